from .report import log, set_log_file, estimate_order, order_table, print_metrics
