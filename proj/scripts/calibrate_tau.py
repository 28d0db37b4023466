#!/usr/bin/env python3
"""Sweep IMS knobs over a corpus and summarize live-window scores.

Runs generate -> cluster-pca -> train-ims -> monitor for each parameter
combination and prints, per ground-truth template, the distribution of
window scores plus the resulting status mix. Use it to pick ims_initial_k,
ims_merge_eps, and ims_tau for a new corpus.
"""

import argparse
import itertools
import json
import statistics
import subprocess
import sys
import tempfile
from collections import Counter, defaultdict
from pathlib import Path


def run(cmd):
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        sys.exit(f"command failed ({proc.returncode}): {' '.join(map(str, cmd))}\n{proc.stderr}")
    return proc.stdout


def write_config(base_text, overrides, path):
    lines = []
    seen = set()
    for line in base_text.splitlines():
        key = line.split("=")[0].strip() if "=" in line else None
        if key in overrides:
            lines.append(f"{key} = {overrides[key]}")
            seen.add(key)
        else:
            lines.append(line)
    for key, val in overrides.items():
        if key not in seen:
            lines.append(f"{key} = {val}")
    path.write_text("\n".join(lines) + "\n")


def summarize(out_dir):
    meta = {}
    for line in (out_dir / "metadata.jsonl").read_text().splitlines():
        j = json.loads(line)
        meta[j["flight_id"]] = j.get("synth_template", "?")
    scores = defaultdict(list)
    statuses = defaultdict(Counter)
    ticks = c_pos = 0
    c_max = 0.0
    for line in (out_dir / "snapshots.jsonl").read_text().splitlines():
        snap = json.loads(line)
        ticks += 1
        c_pos += snap["c"] > 0
        c_max = max(c_max, snap["c"])
        for a in snap["aircraft"]:
            tpl = meta[a["flight_id"]]
            statuses[tpl][a["status"]] += 1
            if a["score"] is not None:
                scores[tpl].append(a["score"])
    return scores, statuses, ticks, c_pos, c_max


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("corpus", type=Path, help="corpus INI file")
    ap.add_argument("config", type=Path, help="base run config INI file")
    ap.add_argument("--cli", type=Path, default=Path("build/tools/trajmine"))
    ap.add_argument("--k", type=int, nargs="+", default=[0], help="ims_initial_k values")
    ap.add_argument("--merge-eps", type=float, nargs="+", default=[0.01])
    ap.add_argument("--tau", type=float, nargs="+", default=[0.02])
    ap.add_argument("--seed", type=int, default=17)
    args = ap.parse_args()

    base_text = args.config.read_text()
    for k, eps, tau in itertools.product(args.k, args.merge_eps, args.tau):
        with tempfile.TemporaryDirectory() as tmp:
            out = Path(tmp)
            cfg = out / "run.ini"
            write_config(base_text,
                         {"ims_initial_k": k, "ims_merge_eps": eps, "ims_tau": tau,
                          "seed": args.seed}, cfg)
            common = [args.cli, "--config", cfg, "--out", out]
            run(common + ["generate", args.corpus])
            run(common + ["cluster-pca", out / "tracks.csv", out / "metadata.jsonl"])
            train_msg = run(common + ["train-ims", out / "tracks.csv", out / "metadata.jsonl",
                                      out / "route_model.json"]).strip()
            run(common + ["monitor", out / "tracks.csv", out / "metadata.jsonl",
                          out / "ims_kb.json"])
            scores, statuses, ticks, c_pos, c_max = summarize(out)

        print(f"\n=== k={k} merge_eps={eps} tau={tau} | {train_msg} ===")
        print(f"ticks={ticks} ticks_with_C>0={c_pos} C_max={c_max:.3f}")
        for tpl in sorted(scores):
            v = sorted(scores[tpl])
            print(f"  {tpl:26s} n={len(v):5d} mean={statistics.mean(v):.4f} "
                  f"p95={v[int(0.95 * (len(v) - 1))]:.4f} max={v[-1]:.4f}  "
                  f"{dict(statuses[tpl])}")


if __name__ == "__main__":
    main()
