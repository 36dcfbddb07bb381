from .suites import SUITES, SuiteReport, run_suite, perturbed_lift
