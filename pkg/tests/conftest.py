import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lz78lab import (construct_general, construct_toy, derive_params,
                     sample_family, verify_general, verify_toy)


def fuzz_word(seed: int, trial: int, max_len: int) -> bytes:
    """Deterministic random word, length log-uniform in [1, max_len]."""
    ss = np.random.SeedSequence([seed, trial])
    rng = np.random.Generator(np.random.PCG64(ss))
    length = max(1, int(round(max_len ** rng.random())))
    return (rng.integers(0, 2, size=length, dtype=np.uint8) + ord("0")).tobytes()


@pytest.fixture(scope="session")
def toy12():
    t0 = time.perf_counter()
    cw = construct_toy(12, 3.0, seed=0)
    report = verify_toy(cw)
    return {"cw": cw, "report": report, "elapsed": time.perf_counter() - t0}


@pytest.fixture(scope="session")
def toy12_alternates():
    t0 = time.perf_counter()
    alts = [(seed, construct_toy(12, 3.0, seed=seed)) for seed in range(1, 6)]
    return {"alts": alts, "elapsed": time.perf_counter() - t0}


@pytest.fixture(scope="session")
def gadget_suite():
    out = {}
    t0 = time.perf_counter()
    for k in (9, 11, 13):
        cw = construct_toy(k, 3.0, seed=0)
        out[k] = (cw, verify_toy(cw))
    return {"suite": out, "elapsed": time.perf_counter() - t0}


@pytest.fixture(scope="session")
def general20():
    out = {}
    t0 = time.perf_counter()
    for l in (1 << 9, 1 << 10):
        params = derive_params(1 << 20, l, gamma=10.0)
        family = sample_family(params, seed=0)
        cw = construct_general(params, family)
        out[l] = (params, family, cw, verify_general(cw))
    return {"runs": out, "elapsed": time.perf_counter() - t0}


def criterion(num: int, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE CRITERION {num}: {'PASS' if passed else 'FAIL'} - {detail}")
