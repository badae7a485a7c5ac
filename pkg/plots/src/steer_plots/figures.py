"""The three figure kinds: scaling, heatmap, target-layers.

Each function reads one or two experiment CSVs (schema: model,n_qubits,mode,
k,t_total,n_layers,n_samples,seed,error,depth,wall_time_s), writes an image,
and returns the fitted quantities so tests can check annotations exactly.
"""
import csv
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

REQUIRED = {"mode", "k", "t_total", "n_layers", "error", "n_qubits"}


class SchemaError(ValueError):
    pass


def read_rows(path: str) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not REQUIRED <= set(reader.fieldnames):
            missing = REQUIRED - set(reader.fieldnames or [])
            raise SchemaError(f"{path}: missing columns {sorted(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _fit_power(xs, ys) -> tuple[float, float]:
    """Least-squares fit y = a * x^b; returns (a, b)."""
    pairs = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pairs) < 2:
        raise SchemaError("power-law fit needs at least 2 positive points")
    lx = np.log([x for x, _ in pairs])
    ly = np.log([y for _, y in pairs])
    b, la = np.polyfit(lx, ly, 1)
    return float(math.exp(la)), float(b)


def plot_scaling(path: str, out: str) -> dict:
    """Log-log error vs t per mode, with fitted slopes and t^{k+1} /
    t^{2k+2} guide lines anchored at the smallest-t data point."""
    rows = read_rows(path)
    k = int(float(rows[0]["k"]))
    by_mode: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        by_mode.setdefault(r["mode"], []).append(
            (float(r["t_total"]), float(r["error"]))
        )
    fig, ax = plt.subplots(figsize=(6, 4.5))
    fits = {}
    for mode in sorted(by_mode):
        pts = sorted(by_mode[mode])
        ts = np.array([t for t, _ in pts])
        es = np.array([e for _, e in pts])
        _, slope = _fit_power(ts, es)
        fits[mode] = slope
        ax.loglog(ts, es, "o-", label=f"{mode} (slope {slope:.2f})")
    t_ref = np.array(sorted({float(r["t_total"]) for r in rows}))
    e_ref = min(float(r["error"]) for r in rows if float(r["error"]) > 0)
    t0 = t_ref[0]
    for order, style in ((k + 1, "--"), (2 * k + 2, ":")):
        ax.loglog(t_ref, e_ref * (t_ref / t0) ** order, style, color="gray",
                  label=f"$t^{{{order}}}$ guide")
    ax.set_xlabel("t")
    ax.set_ylabel("error")
    ax.set_title(f"{rows[0]['model']}, n={rows[0]['n_qubits']}")
    ax.legend(fontsize=8)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return {"slopes": fits, "k": k}


def _best_errors(rows) -> dict[tuple[float, int], float]:
    """Per (t, n_layers) cell: the best (lowest) error over all modes."""
    best: dict[tuple[float, int], float] = {}
    for r in rows:
        key = (float(r["t_total"]), int(r["n_layers"]))
        e = float(r["error"])
        if key not in best or e < best[key]:
            best[key] = e
    return best


def plot_heatmap(path_a: str, path_b: str, out: str,
                 mask_above: float = 0.9) -> dict:
    """Ratio of best error in CSV A over best error in CSV B, per
    (t, layers) cell; cells where either best error exceeds `mask_above`
    are masked out."""
    best_a = _best_errors(read_rows(path_a))
    best_b = _best_errors(read_rows(path_b))
    keys = sorted(set(best_a) & set(best_b))
    if not keys:
        raise SchemaError("no overlapping (t_total, n_layers) cells")
    ts = sorted({t for t, _ in keys})
    ls = sorted({l for _, l in keys})
    ratio = np.full((len(ls), len(ts)), np.nan)
    masked = 0
    for (t, l) in keys:
        a, b = best_a[(t, l)], best_b[(t, l)]
        if a > mask_above or b > mask_above:
            masked += 1
            continue
        ratio[ls.index(l), ts.index(t)] = a / b if b > 0 else np.inf
    fig, ax = plt.subplots(figsize=(6, 4.5))
    im = ax.imshow(ratio, origin="lower", aspect="auto", cmap="RdBu_r")
    ax.set_xticks(range(len(ts)), [f"{t:g}" for t in ts], fontsize=7)
    ax.set_yticks(range(len(ls)), [str(l) for l in ls], fontsize=7)
    ax.set_xlabel("t")
    ax.set_ylabel("layers")
    fig.colorbar(im, ax=ax, label="error ratio (A / B)")
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return {"ratio": ratio, "t_values": ts, "layer_values": ls,
            "masked_cells": masked}


def plot_target_layers(path: str, out: str) -> dict:
    """Layers-to-target vs system size per mode, with a*n^b fits."""
    rows = read_rows(path)
    by_mode: dict[str, list[tuple[int, int]]] = {}
    for r in rows:
        by_mode.setdefault(r["mode"], []).append(
            (int(r["n_qubits"]), int(r["n_layers"]))
        )
    fig, ax = plt.subplots(figsize=(6, 4.5))
    fits = {}
    for mode in sorted(by_mode):
        pts = sorted(by_mode[mode])
        ns = np.array([n for n, _ in pts], dtype=float)
        ys = np.array([y for _, y in pts], dtype=float)
        a, b = _fit_power(ns, ys)
        fits[mode] = (a, b)
        ax.loglog(ns, ys, "o", label=f"{mode}: ${a:.2f}\\,n^{{{b:.2f}}}$")
        ax.loglog(ns, a * ns ** b, "-", alpha=0.5)
    ax.set_xlabel("n")
    ax.set_ylabel("layers to target")
    ax.legend(fontsize=8)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return {"fits": fits}
