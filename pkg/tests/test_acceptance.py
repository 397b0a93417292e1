"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL <detail>`` line to the
terminal (visible without ``-s``) and then asserts the same condition.
"""

import csv
import io
import itertools
import json
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from ecocnet import codebook as cb
from ecocnet import decoder as dc
from ecocnet import evaluator as ev
from ecocnet import features as ft
from ecocnet import harness as h
from ecocnet import network as nw
from ecocnet.dataset import generate_synthetic


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail
    return emit


def _flat(g):
    return np.concatenate([g.hidden.ravel(), g.output.ravel()])


def _finite_difference(net, x, targets, cost, eps=1e-5):
    grads = []
    for w in (net.hidden_weights, net.output_weights):
        g = np.empty_like(w)
        for idx in np.ndindex(w.shape):
            keep = w[idx]
            w[idx] = keep + eps
            up = cost(net, x, targets)
            w[idx] = keep - eps
            down = cost(net, x, targets)
            w[idx] = keep
            g[idx] = (up - down) / (2 * eps)
        grads.append(g)
    return np.concatenate([grads[0].ravel(), grads[1].ravel()])


def _rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)


def test_criterion_1_gradient_oracle(report):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = {"standard": 0.0, "weighted": 0.0}
    instances = 120
    for trial in range(instances):
        l, hid, b, n = (int(v) for v in rng.integers([1, 1, 1, 1], [11, 11, 9, 7]))
        net = nw.init(l, hid, b, seed=trial, init_scale=1.0)
        x = rng.normal(size=(n, l))
        d = rng.integers(0, 2, size=(n, b)).astype(float)
        mask = rng.random((n, b)) < 0.2 if trial % 2 else np.zeros((n, b), bool)
        targets = np.ma.MaskedArray(d, mask=mask)
        std = _flat(nw.gradient(net, x, targets, "standard"))
        worst["standard"] = max(worst["standard"],
                                _rel(std, _finite_difference(net, x, targets, nw.cost_standard)))
        wtd = 2.0 * _flat(nw.gradient(net, x, targets, "weighted"))
        worst["weighted"] = max(worst["weighted"],
                                _rel(wtd, _finite_difference(net, x, targets, nw.cost_weighted)))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-6 and elapsed < 30
    report(1, ok, f"{instances} instances, max rel err standard={worst['standard']:.2e} "
                  f"weighted(x2)={worst['weighted']:.2e}, {elapsed:.1f}s")


def _brute_min_distance(z):
    return min(int((a != b).sum()) for a, b in itertools.combinations(z, 2))


def test_criterion_2_error_correction(report):
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    failures, checked, details = 0, 0, []
    for length in (15, 31):
        m = cb.bch(15, length)
        z = m.entries
        d = _brute_min_distance(z)
        t = (d - 1) // 2
        details.append(f"bch(15,{length}) d={d} t={t}")
        if length == 15:
            flip_sets = [(i, f) for i in range(15) for k in range(t + 1)
                         for f in itertools.combinations(range(length), k)]
        else:
            flip_sets = [(int(rng.integers(15)),
                          rng.choice(length, size=int(rng.integers(0, t + 1)), replace=False))
                         for _ in range(10_000)]
        for i, flips in flip_sets:
            y = z[i].astype(float)
            y[list(flips)] = 1 - y[list(flips)]
            failures += dc.classify(y, m) != i
            checked += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    report(2, ok, f"{'; '.join(details)}; {checked} corrupted words, {failures} misdecoded, "
                  f"{elapsed:.1f}s")


def test_criterion_3_code_matrix_suite(report):
    start = time.perf_counter()
    problems = []
    suite = {
        "one_vs_all(15)": cb.one_vs_all(15),
        "one_vs_one(15)": cb.one_vs_one(15),
        "exhaustive(7)": cb.exhaustive(7),
        "dense_random(15,39)": cb.dense_random(15, 39, seed=0),
        "sparse_random(15,59)": cb.sparse_random(15, 59, seed=0),
        "bch(15,15)": cb.bch(15, 15),
        "bch(15,31)": cb.bch(15, 31),
        "bch(40,63)": cb.bch(40, 63),
    }
    for name, m in suite.items():
        try:
            cb.validate(m)
        except Exception as exc:  # collect every failure for the report line
            problems.append(f"{name}: {exc}")
    for c in (3, 7, 15):
        if cb.min_row_distance(cb.one_vs_all(c)) != 2:
            problems.append(f"one_vs_all({c}) d != 2")
    expected_shapes = {"one_vs_one(15)": (15, 105), "dense_random(15,39)": (15, 39),
                       "sparse_random(15,59)": (15, 59)}
    for name, shape in expected_shapes.items():
        if suite[name].shape != shape:
            problems.append(f"{name} shape {suite[name].shape}")

    seen = [cb.min_row_distance(m := cb.dense_random(8, 20, seed=3, trials=1))]
    improved = cb.hill_climb_improve(m, 1000, seed=0,
                                     on_accept=lambda z: seen.append(cb.min_row_distance(z)))
    if any(b < a for a, b in zip(seen, seen[1:])) or cb.min_row_distance(improved) < seen[0]:
        problems.append(f"hill climb decreased distance: {seen}")
    elapsed = time.perf_counter() - start
    ok = not problems and elapsed < 30
    report(3, ok, f"{len(suite)} generators validated, hill climb d {seen[0]}->{seen[-1]} over "
                  f"{len(seen) - 1} accepted flips, {elapsed:.1f}s"
                  + (f"; problems: {problems}" if problems else ""))


def test_criterion_4_pca_suite(report):
    start = time.perf_counter()
    x = np.random.default_rng(11).normal(size=(100, 50)) @ np.diag(np.linspace(3, 0.2, 50))
    models = [ft.pca_fit(x, k) for k in range(1, 51)]
    ortho = max(np.abs(m.components @ m.components.T - np.eye(m.output_dim)).max()
                for m in models)
    lam_max = models[-1].eigenvalues[0]
    off = 0.0
    for m in models[1:]:
        cov = np.cov(ft.pca_project(m, x), rowvar=False)
        off = max(off, np.abs(cov - np.diag(np.diag(cov))).max())
    mse = [np.mean((ft.pca_reconstruct(m, ft.pca_project(m, x)) - x) ** 2) for m in models]
    increases = sum(b > a for a, b in zip(mse, mse[1:]))
    elapsed = time.perf_counter() - start
    ok = ortho <= 1e-8 and off <= 1e-6 * lam_max and increases == 0 and elapsed < 30
    report(4, ok, f"k=1..50: orthonormality {ortho:.1e}, off-diagonal {off:.1e} <= {1e-6 * lam_max:.1e}, "
                  f"MSE increases over k=1..50: {increases}, {elapsed:.1f}s")


def _unclipped_rr(y, m):
    dist = dc.distances(y, m)
    i1, i2 = np.argsort(dist, kind="stable")[:2]
    a, b = m.entries[i1], m.entries[i2]
    hd = int(((a != b) & (a != cb.DONT_CARE) & (b != cb.DONT_CARE)).sum())
    return (dist[i2] - dist[i1]) / hd * 100


def test_criterion_5_decoder_suite(report):
    rng = np.random.default_rng(5)
    pool = [cb.one_vs_all(6), cb.exhaustive(5), cb.bch(15, 15), cb.bch(15, 31),
            cb.dense_random(10, 20, seed=1), cb.one_vs_one(6), cb.sparse_random(12, 40, seed=2)]
    rr_out, raw_above = 0, 0
    for _ in range(10_000):
        m = pool[rng.integers(len(pool))]
        y = rng.random(m.code_length)
        rr = dc.robustness_rate(y, m)
        rr_out += not 0.0 <= rr <= 100.0
        raw_above += _unclipped_rr(y, m) > 100.0 + 1e-9
    binary = [m for m in pool if m.is_binary]
    at_codeword = [dc.robustness_rate(row.astype(float), m) for m in binary for row in m.entries]
    hamming_bad = 0
    for m in binary:
        for y in rng.integers(0, 2, size=(200, m.code_length)):
            hamming_bad += not np.array_equal(dc.distances(y.astype(float), m),
                                              (m.entries != y).sum(axis=1))
    m = cb.bch(15, 31)
    labels = rng.integers(0, 15, 300)
    outputs = np.clip(m.entries[labels] + rng.normal(0, 0.45, (300, 31)), 0, 1)
    identity = max(abs(r.recognition_rate + r.error_rate + r.rejection_rate - 100)
                   for r in (ev.score_outputs(outputs, labels, m, t) for t in np.linspace(0, 100, 41)))
    ok = rr_out == 0 and all(v == 100.0 for v in at_codeword) and hamming_bad == 0 \
        and identity <= 1e-9
    report(5, ok, f"RR out of [0,100]: {rr_out}/10000 (unclipped ternary ratio above 100: "
                  f"{raw_above}); RR at codeword min {min(at_codeword)}; "
                  f"Hamming mismatches {hamming_bad}; rate identity max dev {identity:.1e}")


DEFAULT_CONFIG = {
    "dataset": {"synthetic": {}},
    "code": {"method": "bch", "length": 31},
}


@pytest.fixture(scope="module")
def compare_runs(tmp_path_factory):
    """Two full ``compare`` runs on the default configuration."""
    root = tmp_path_factory.mktemp("compare")
    config = root / "default.json"
    config.write_text(json.dumps(DEFAULT_CONFIG))
    runs = []
    for name in ("first.csv", "second.csv"):
        start = time.perf_counter()
        code = h.main(["compare", "--config", str(config), "--report", str(root / name)])
        runs.append((code, (root / name).read_bytes(), time.perf_counter() - start))
    return runs


def test_criterion_6_desk_scale_end_to_end(report, compare_runs):
    code, raw, elapsed = compare_runs[0]
    rows = {r[0]: [float(v) for v in r[1:]] for r in csv.reader(io.StringIO(raw.decode()))
            if r[0] != "Method"}
    standard, weighted = rows["Standard BP"], rows["Proposed method"]
    rho_s = spearmanr([2, 4, 6, 8], standard)[0]
    rho_w = spearmanr([2, 4, 6, 8], weighted)[0]
    gaps = [w - s for w, s in zip(weighted, standard)]
    ok = code == 0 and rho_s > 0 and rho_w > 0 and min(gaps) >= -1.0 and elapsed < 300
    fmt = lambda vals: "/".join(f"{v:.2f}" for v in vals)  # noqa: E731
    report(6, ok, f"standard {fmt(standard)} (rho={rho_s:.2f}); weighted {fmt(weighted)} "
                  f"(rho={rho_w:.2f}); weighted-standard {fmt(gaps)} pp; {elapsed:.0f}s")


def test_criterion_7_rejection_and_reliability(report):
    start = time.perf_counter()
    data = generate_synthetic()
    matrix = cb.bch(15, 31)
    cfg = h.ExperimentConfig.from_dict(DEFAULT_CONFIG)
    outs = ev.experiment_outputs(data, matrix, cfg.train, cfg.split, cfg.hidden_dim, cfg.pca_k)
    accuracy = ev.report_from_outputs(outs, matrix, 0.0).recognition_rate
    at_25 = ev.report_from_outputs(outs, matrix, 25.0)
    rejection = [ev.report_from_outputs(outs, matrix, t).rejection_rate for t in (0, 10, 25, 50)]
    per_split_monotone = all(
        all(a <= b for a, b in zip(r, r[1:]))
        for r in zip(*[[s.rejection_rate for s in ev.report_from_outputs(outs, matrix, t).splits]
                       for t in (0, 10, 25, 50)])
    )
    elapsed = time.perf_counter() - start
    ok = (at_25.reliability is not None and at_25.reliability >= accuracy
          and all(a <= b for a, b in zip(rejection, rejection[1:])) and per_split_monotone
          and elapsed < 60)
    report(7, ok, f"{cfg.split.name} x{cfg.split.split_count}: accuracy@0 {accuracy:.2f}, "
                  f"reliability@25 {at_25.reliability:.2f}; rejection at 0/10/25/50 "
                  f"{'/'.join(f'{r:.1f}' for r in rejection)}; {elapsed:.1f}s")


def test_criterion_8_determinism(report, compare_runs):
    (c1, a, _), (c2, b, _) = compare_runs
    ok = c1 == c2 == 0 and a == b
    report(8, ok, f"two compare runs: {len(a)} and {len(b)} bytes, identical={a == b}")
