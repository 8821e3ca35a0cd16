"""Freeze two-sample t-test reference values from scipy into a JSON fixture.

    python scripts/make_ttest_fixtures.py > tests/fixtures/ttest_oracle.json
"""
import json

import numpy as np
from scipy import stats


def case(name, a, b):
    pooled = stats.ttest_ind(a, b, equal_var=True)
    welch = stats.ttest_ind(a, b, equal_var=False)
    na, nb = len(a), len(b)
    va, vb = np.var(a, ddof=1), np.var(b, ddof=1)
    welch_df = (va / na + vb / nb) ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return {
        "name": name,
        "a": [float(x) for x in a],
        "b": [float(x) for x in b],
        "pooled": {"t": float(pooled.statistic), "df": float(na + nb - 2), "p": float(pooled.pvalue)},
        "welch": {"t": float(welch.statistic), "df": float(welch_df), "p": float(welch.pvalue)},
    }


def main():
    rng = np.random.default_rng(20240611)
    cases = [case("shifted-integers", [1, 2, 3, 4, 5], [3, 4, 5, 6, 7])]
    for i in range(19):
        na = int(rng.integers(2, 60))
        nb = int(rng.integers(2, 60))
        shift = float(rng.choice([0.0, 0.05, 0.2, 0.5, 1.0, 3.0]))
        scale_b = float(rng.choice([0.5, 1.0, 2.0]))
        a = np.round(rng.normal(0.5, 0.2, na), 4)
        b = np.round(rng.normal(0.5 + shift * 0.2, 0.2 * scale_b, nb), 4)
        cases.append(case(f"random-{i + 1:02d}", a.tolist(), b.tolist()))
    identical = [0.2, 0.4, 0.4, 0.6, 0.9]
    print(json.dumps({"cases": cases, "identical": {"a": identical, "b": identical}}, indent=1))


if __name__ == "__main__":
    main()
