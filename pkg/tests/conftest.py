import numpy as np
import pytest

from loadlens.features import FEATURE_COLUMNS, SessionFeatures
from loadlens.ingest import DEFAULT_ACTIVITIES


def make_rows(X, codes, columns):
    """Fabricate SessionFeatures rows with the given values in `columns`.

    Unselected features are filled with 0.0; activities come from the
    default registry by integer code.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    rows = []
    for i, (vals, code) in enumerate(zip(X, codes)):
        kwargs = {attr: 0.0 for attr in FEATURE_COLUMNS.values()}
        kwargs["session_id"] = f"s{i:04d}"
        kwargs["activity"] = DEFAULT_ACTIVITIES[int(code)]
        for name, v in zip(columns, vals):
            kwargs[FEATURE_COLUMNS[name]] = float(v)
        rows.append(SessionFeatures(**kwargs))
    return rows


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
