__version__ = "0.1.0"

REPORT_SCHEMA = "segment-bethe-report/1"
