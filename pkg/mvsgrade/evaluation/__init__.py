from mvsgrade.evaluation.confusion import BinaryConfusion, StageConfusion, \
    confusion, read_labels, pair_labels
from mvsgrade.evaluation.metrics import MetricsReport, OrdinalErrors, \
    StageSummary, METRIC_NAMES, metrics, ordinal_errors, stage_breakdown, \
    report_frame, format_table, write_report
from mvsgrade.evaluation.graders import GraderLog, GraderLogError, \
    HourlyAccuracy, hourly_accuracy, load_grader_log, write_grader_log
from mvsgrade.evaluation.revenue import accuracy_gain, revenue_gain
