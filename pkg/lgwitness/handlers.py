import json
import logging
import traceback
from datetime import datetime, timezone


class JSONLinesHandler(logging.Handler):
    """ Logging handler which appends log entries to a JSON-lines run log. """

    def __init__(self, filename, level=logging.NOTSET):
        super(JSONLinesHandler, self).__init__(level)
        self.filename = filename

    def emit(self, record):
        """ Catch the log entry, grab any traceback data and any extra data if provided. """
        try:
            trace = "".join(traceback.format_exception(*record.exc_info)) if record.exc_info else None
            extra = record.__dict__.get("extra")

            entry = {
                "logger": record.name,
                "level": record.levelname,
                "msg": record.getMessage(),
                "trace": trace,
                "extra": extra,
                "created": datetime.fromtimestamp(record.created, timezone.utc).isoformat(),
            }

            with open(self.filename, "a") as f:
                f.write(json.dumps(entry, default=str) + "\n")
        except Exception:
            self.handleError(record)
