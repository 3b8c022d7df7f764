"""Run the fixed verification suites, the same ones the CLI exposes."""
import time

from fracrules.suites import SUITES

for name, suite in SUITES.items():
    start = time.perf_counter()
    result = suite()
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} {name:20} {len(result.cases):3} cases  worst {result.max_value:.2e}"
          f"  ({time.perf_counter() - start:.1f}s)")
