"""Command-line interface: extract, split, train-eval, ablate, report.

Exit codes: 0 clean run, 1 some images failed, 2 unusable input.
Option values resolve as flag > ``--config`` file > defaults; the seed
additionally falls back to ``$TEXPYR_SEED`` before the default.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from texpyr import __version__
from texpyr.dataset import (
    FeatureTable,
    LabeledCorpus,
    read_features_csv,
    scan_corpus,
    source_id,
    split_indices,
    write_features_csv,
)
from texpyr.errors import EmptyCorpus, TexpyrError, UnreadableDirectory
from texpyr.experiment import (
    CLASSIFIERS,
    SUBSET_TITLES,
    SUBSETS,
    ablation,
    ablation_markdown,
    holdout,
    kfold,
)
from texpyr.imagecore import encode_png, read_image
from texpyr.pipeline import ExtractionConfig, extract_tio, feature_schema, pyramid_level_images

log = logging.getLogger("texpyr")

EXIT_OK, EXIT_PARTIAL, EXIT_UNUSABLE = 0, 1, 2
MANIFEST_NAME = "texpyr-manifest.jsonl"

DEFAULTS = {
    "levels": 3,
    "glcm_levels": 8,
    "glcm_distance": 1,
    "ratio": 0.7,
    "seed": 0,
    "shrinkage": 0.01,
    "classifier": "lda",
    "descriptor_subset": "tio",
    "k": 1,
    "jobs": 1,
}
_TYPES = {"levels": int, "glcm_levels": int, "glcm_distance": int, "ratio": float, "seed": int,
          "shrinkage": float, "classifier": str, "descriptor_subset": str, "k": int, "jobs": int}


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _TYPES[key](value)
    return out


def resolve(args: argparse.Namespace, keys) -> dict:
    config = read_config_file(args.config) if getattr(args, "config", None) else {}
    out = {}
    for key in keys:
        flag = getattr(args, key, None)
        if flag is not None:
            out[key] = flag
        elif key in config:
            out[key] = config[key]
        elif key == "seed" and os.environ.get("TEXPYR_SEED", "").strip():
            out[key] = int(os.environ["TEXPYR_SEED"])
        else:
            out[key] = DEFAULTS[key]
    return out


def append_manifest(path, record: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")


def _manifest_record(command: str, config: dict, inputs, started: float, **extra) -> dict:
    rec = {
        "command": command,
        "version": __version__,
        "schema_version": feature_schema(config.get("levels", 3)).version,
        "config": config,
        "seed": config.get("seed"),
        "inputs": [str(p) for p in inputs],
        "started_utc": datetime.fromtimestamp(started, timezone.utc).isoformat(),
        "elapsed_s": round(time.time() - started, 3),
        "errors": [],
    }
    rec.update(extra)
    return rec


# --- extract ------------------------------------------------------------------


def _extract_one(job):
    path, sid, label, config, dump_dir = job
    try:
        img = read_image(path)
        vec = extract_tio(img, config, source_id=sid)
        if dump_dir is not None:
            stem = sid.replace("/", "__").rsplit(".", 1)[0]
            for lvl, im in enumerate(pyramid_level_images(img, config.pyramid_levels)):
                (Path(dump_dir) / f"{stem}_L{lvl}.png").write_bytes(encode_png(im))
        return sid, label, vec.values, None
    except (TexpyrError, OSError, ValueError) as exc:
        return sid, label, None, f"{type(exc).__name__}: {exc}"


def cmd_extract(args) -> int:
    started = time.time()
    cfg = resolve(args, ("levels", "glcm_levels", "glcm_distance", "jobs"))
    config = ExtractionConfig(
        glcm_levels=cfg["glcm_levels"], glcm_distance=cfg["glcm_distance"], pyramid_levels=cfg["levels"]
    )
    out_csv = Path(args.out_csv)
    manifest = Path(args.manifest) if args.manifest else out_csv.parent / MANIFEST_NAME
    root = Path(args.corpus_root)
    try:
        corpus: LabeledCorpus = scan_corpus(root)
    except (EmptyCorpus, UnreadableDirectory) as exc:
        print(f"error: {exc}", file=sys.stderr)
        append_manifest(manifest, _manifest_record("extract", cfg, [root], started,
                                                   outputs=[], errors=[{"error": str(exc)}]))
        return EXIT_UNUSABLE

    dump_dir = None
    if args.dump_levels:
        dump_dir = Path(args.dump_levels)
        dump_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(p, source_id(p, root), label, config, dump_dir) for p, label in corpus.items]
    if cfg["jobs"] > 1:
        with ProcessPoolExecutor(max_workers=cfg["jobs"]) as pool:
            results = list(pool.map(_extract_one, jobs, chunksize=4))
    else:
        results = [_extract_one(j) for j in jobs]
    results.sort(key=lambda r: r[0])

    ok = [r for r in results if r[3] is None]
    failed = [{"source_id": r[0], "error": r[3]} for r in results if r[3] is not None]
    schema = feature_schema(config.pyramid_levels)
    values = np.array([r[2] for r in ok], dtype=np.float64).reshape(len(ok), schema.total_dims)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    write_features_csv(out_csv, FeatureTable([r[0] for r in ok], [r[1] for r in ok], schema.columns, values))
    schema_path = out_csv.with_suffix(".schema.txt")
    schema_path.write_text(schema.manifest(), encoding="utf-8")

    for f in failed:
        log.warning("failed %s: %s", f["source_id"], f["error"])
    print(f"extracted {len(ok)}/{len(results)} images -> {out_csv} ({schema.total_dims} features)")
    append_manifest(manifest, _manifest_record(
        "extract", cfg, [root], started, outputs=[str(out_csv), str(schema_path)],
        n_images=len(results), n_ok=len(ok), errors=failed, schema_fingerprint=schema.fingerprint(),
    ))
    return EXIT_OK if not failed else EXIT_PARTIAL


# --- shared loading -----------------------------------------------------------


def _load_table(path, levels: int) -> FeatureTable:
    return read_features_csv(path, expected_columns=feature_schema(levels).columns)


# --- split --------------------------------------------------------------------


def cmd_split(args) -> int:
    started = time.time()
    cfg = resolve(args, ("ratio", "seed", "levels"))
    src = Path(args.input)
    try:
        if src.is_dir():
            corpus = scan_corpus(src)
            ids = [source_id(p, src) for p, _ in corpus.items]
            labels = corpus.labels
        else:
            table = _load_table(src, cfg["levels"])
            ids, labels = table.source_ids, table.labels
        tr, te = split_indices(labels, cfg["ratio"], cfg["seed"])
    except (TexpyrError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNUSABLE
    part = np.empty(len(ids), dtype=object)
    part[tr] = "train"
    part[te] = "test"
    out = Path(args.out_csv)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["source_id", "label", "partition"])
        w.writerows(zip(ids, labels, part))
    print(f"train={tr.size} test={te.size} -> {out}")
    manifest = Path(args.manifest) if args.manifest else out.parent / MANIFEST_NAME
    append_manifest(manifest, _manifest_record("split", cfg, [src], started, outputs=[str(out)]))
    return EXIT_OK


# --- train-eval ---------------------------------------------------------------


def cmd_train_eval(args) -> int:
    started = time.time()
    cfg = resolve(args, ("ratio", "seed", "shrinkage", "classifier", "descriptor_subset", "k", "levels"))
    src = Path(args.features_csv)
    manifest = Path(args.manifest) if args.manifest else src.parent / MANIFEST_NAME
    try:
        table = _load_table(src, cfg["levels"])
        common = dict(
            seed=cfg["seed"], classifier=cfg["classifier"], shrinkage=cfg["shrinkage"], k=cfg["k"],
            subset=cfg["descriptor_subset"], pyramid_levels=cfg["levels"],
        )
        if args.folds:
            reports = kfold(table, args.folds, **common)
        else:
            reports = [holdout(table, ratio=cfg["ratio"], **common)]
    except (TexpyrError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        append_manifest(manifest, _manifest_record("train-eval", cfg, [src], started,
                                                   errors=[{"error": str(exc)}]))
        return EXIT_UNUSABLE

    acc = float(np.mean([r.accuracy for r in reports]))
    clf = cfg["classifier"].upper()
    print(f"| Descriptors | {clf} |\n|---|---:|\n| {SUBSET_TITLES[cfg['descriptor_subset']]} | {100 * acc:.2f} |")
    payload = {"accuracy": acc, "descriptor_subset": cfg["descriptor_subset"],
               "classifier": cfg["classifier"], "reports": [r.to_dict() for r in reports]}
    if args.report_json:
        Path(args.report_json).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    append_manifest(manifest, _manifest_record(
        "train-eval", cfg, [src], started, accuracy=acc,
        outputs=[args.report_json] if args.report_json else [],
    ))
    return EXIT_OK


# --- ablate -------------------------------------------------------------------


def cmd_ablate(args) -> int:
    started = time.time()
    cfg = resolve(args, ("ratio", "seed", "shrinkage", "k", "levels"))
    classifiers = args.classifier or ["lda"]
    seeds = args.seeds or [cfg["seed"]]
    src = Path(args.features_csv)
    manifest = Path(args.manifest) if args.manifest else src.parent / MANIFEST_NAME
    try:
        table = _load_table(src, cfg["levels"])
        rows = ablation(table, classifiers, seeds, cfg["ratio"], cfg["shrinkage"], cfg["k"], cfg["levels"])
    except (TexpyrError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        append_manifest(manifest, _manifest_record("ablate", cfg, [src], started,
                                                   errors=[{"error": str(exc)}]))
        return EXIT_UNUSABLE
    md = ablation_markdown(rows)
    print(md, end="")
    outputs = []
    if args.out_md:
        Path(args.out_md).write_text(md, encoding="utf-8")
        outputs.append(args.out_md)
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write("subset,classifier,dims,mean_accuracy," + ",".join(f"seed_{s}" for s in seeds) + "\n")
            for r in rows:
                accs = ",".join(repr(a) for a in r.accuracies)
                fh.write(f"{r.subset},{r.classifier},{r.dims},{r.mean!r},{accs}\n")
        outputs.append(args.out_csv)
    append_manifest(manifest, _manifest_record(
        "ablate", {**cfg, "classifiers": classifiers, "seeds": seeds}, [src], started, outputs=outputs,
        results=[{"subset": r.subset, "classifier": r.classifier, "mean": r.mean} for r in rows],
    ))
    return EXIT_OK


# --- report -------------------------------------------------------------------


def cmd_report(args) -> int:
    """Collate train-eval JSON reports into a descriptor x classifier table."""
    started = time.time()
    cells: dict[tuple[str, str], list[float]] = {}
    try:
        for p in args.reports:
            data = json.loads(Path(p).read_text(encoding="utf-8"))
            cells.setdefault((data["descriptor_subset"], data["classifier"]), []).append(data["accuracy"])
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read report: {exc}", file=sys.stderr)
        return EXIT_UNUSABLE
    classifiers = [c for c in CLASSIFIERS if any(k[1] == c for k in cells)]
    lines = ["| Descriptors | " + " | ".join(c.upper() for c in classifiers) + " |",
             "|---|" + "---:|" * len(classifiers)]
    for s in SUBSETS:
        if not any(k[0] == s for k in cells):
            continue
        vals = [f"{100 * np.mean(cells[(s, c)]):.2f}" if (s, c) in cells else "-" for c in classifiers]
        lines.append(f"| {SUBSET_TITLES[s]} | " + " | ".join(vals) + " |")
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out_md:
        Path(args.out_md).write_text(text, encoding="utf-8")
    manifest = Path(args.manifest) if args.manifest else Path(MANIFEST_NAME)
    append_manifest(manifest, _manifest_record("report", {}, args.reports, started,
                                               outputs=[args.out_md] if args.out_md else []))
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="texpyr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"texpyr {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--manifest", help=f"run manifest (JSON lines, appended); default {MANIFEST_NAME}")
        p.add_argument("--levels", type=int, help="pyramid levels (default 3)")

    p = sub.add_parser("extract", help="compute TiO features for a corpus root/<class>/<image>")
    p.add_argument("corpus_root")
    p.add_argument("out_csv")
    common(p)
    p.add_argument("--glcm-levels", type=int, help="gray levels for GLCM/Haralick (default 8)")
    p.add_argument("--glcm-distance", type=int, help="GLCM pixel distance (default 1)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--dump-levels", metavar="DIR", help="write each pyramid level as PNG")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("split", help="write a stratified train/test assignment")
    p.add_argument("input", help="feature CSV or corpus root")
    p.add_argument("out_csv")
    common(p)
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train-eval", help="split, normalize, fit and score one classifier")
    p.add_argument("features_csv")
    common(p)
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--shrinkage", type=float)
    p.add_argument("--classifier", choices=CLASSIFIERS)
    p.add_argument("--descriptor-subset", choices=SUBSETS)
    p.add_argument("--k", type=int, help="neighbours for knn (default 1)")
    p.add_argument("--folds", type=int, help="stratified k-fold instead of a holdout split")
    p.add_argument("--report-json")
    p.set_defaults(func=cmd_train_eval)

    p = sub.add_parser("ablate", help="accuracy per descriptor subset and classifier")
    p.add_argument("features_csv")
    common(p)
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", type=int, nargs="+", help="average over these seeds")
    p.add_argument("--shrinkage", type=float)
    p.add_argument("--classifier", choices=CLASSIFIERS, action="append")
    p.add_argument("--k", type=int)
    p.add_argument("--out-md")
    p.add_argument("--out-csv")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="tabulate train-eval JSON reports")
    p.add_argument("reports", nargs="+")
    p.add_argument("--manifest")
    p.add_argument("--out-md")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
