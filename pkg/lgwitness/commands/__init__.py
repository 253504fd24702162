""" Batch jobs behind the manage.py commands. """
