import json
import logging
import os

import sentry_sdk
from flask import Flask, current_app, has_app_context

from lgwitness import default_settings

# Create app
app = Flask(__name__)
app.config.from_object("lgwitness.default_settings")
if os.environ.get("LGWITNESS_SETTINGS"):
    app.config.from_file(os.environ["LGWITNESS_SETTINGS"], load=json.load)

# Error reporting; capture calls are no-ops until a DSN is configured.
if app.config["SENTRY_DSN"]:
    sentry_sdk.init(dsn=app.config["SENTRY_DSN"])


def setting(key):
    """ Returns a config value from the active app, or the packaged default outside an app context. """
    if has_app_context():
        return current_app.config[key]
    return getattr(default_settings, key)


def configure_logging(_app=None):
    """ Set the package logger level and attach the JSON-lines run log if one is configured. """
    from lgwitness.handlers import JSONLinesHandler

    _app = _app or app
    _app.logger.setLevel(_app.config["LOG_LEVEL"])

    for handler in list(_app.logger.handlers):
        if isinstance(handler, JSONLinesHandler):
            _app.logger.removeHandler(handler)

    if _app.config["LOG_FILE"]:
        file_handler = JSONLinesHandler(_app.config["LOG_FILE"])
        file_handler.setLevel(logging.INFO)
        _app.logger.addHandler(file_handler)


# Setup logging
configure_logging()
