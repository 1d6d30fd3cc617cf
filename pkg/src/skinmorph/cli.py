"""Command line front end.

Subcommands: postprocess (clean detector masks), train (fit thresholds),
eval (score against ground truth), compare (rank methods and test
significance), classify (inspect class decisions). Written artifacts
are byte-stable across reruns; anything time-dependent goes to stdout
only.
"""

import argparse
import hashlib
import os
import sys
import time
from dataclasses import fields as dataclass_fields
from dataclasses import replace

from .classification import classify
from .dataset_io import (DecodeError, ManifestError, decode_mask,
                         decode_probability_map, encode_mask, load_grid,
                         load_manifest, load_params, save_params)
from .evaluation import (ConfusionCounts, average_precision, confusion, f1,
                         global_rank, wilcoxon_signed_rank)
from .mask_core import foreground_count, threshold
from .pipelines import (DEFAULT_CONFIG, PipelineConfig, postprocess_adaptive,
                        postprocess_baseline)
from .training import (CorpusEntry, GridSpec, TrainingCorpus, grid_search,
                       leave_one_dataset_out)


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _resolve(path, manifest_path):
    if os.path.isabs(path):
        return path
    return os.path.join(os.path.dirname(os.path.abspath(manifest_path)), path)


def _add_config_flags(parser):
    group = parser.add_argument_group(
        "pipeline overrides", "structural knobs; defaults suit ~224px frames")
    for f in dataclass_fields(PipelineConfig):
        flag = "--" + f.name.replace("_", "-")
        group.add_argument(flag, type=int, default=None, metavar="N")


def _config_from(args):
    overrides = {}
    for f in dataclass_fields(PipelineConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            overrides[f.name] = value
    if overrides:
        return replace(DEFAULT_CONFIG, **overrides)
    return DEFAULT_CONFIG


def _load_prediction(path, tau):
    if tau is None:
        return decode_mask(path)
    return threshold(decode_probability_map(path), tau)


def _check_unique_names(entries):
    seen = {}
    for e in entries:
        name = os.path.basename(e.prediction)
        if name in seen:
            raise ManifestError(
                f"duplicate output name {name!r} from {seen[name]!r} "
                f"and {e.prediction!r}")
        seen[name] = e.prediction


def cmd_postprocess(args):
    manifest = load_manifest(args.manifest)
    config = _config_from(args)
    if args.mode == "adaptive":
        if not args.params:
            raise ManifestError("adaptive mode needs --params")
        params = load_params(args.params)
    else:
        params = None
    _check_unique_names(manifest.entries)
    os.makedirs(args.out, exist_ok=True)
    durations = []
    for e in manifest.entries:
        pred = _load_prediction(_resolve(e.prediction, args.manifest), args.tau)
        start = time.perf_counter()
        if params is None:
            out = postprocess_baseline(pred, config)
            cls = "-"
        else:
            out, pattern = postprocess_adaptive(pred, params, config)
            cls = str(pattern)
        durations.append(time.perf_counter() - start)
        name = os.path.basename(e.prediction)
        encode_mask(out, os.path.join(args.out, name))
        print(f"{name}\tclass={cls}\t{durations[-1] * 1000:.1f} ms")
    total = sum(durations)
    print(f"processed {len(durations)} masks in {total:.3f} s "
          f"(mean {total / len(durations) * 1000:.1f} ms, "
          f"max {max(durations) * 1000:.1f} ms)")
    print(f"wrote {len(durations)} masks to {args.out}")
    return 0


def _load_corpus(manifest_paths, tau):
    entries = []
    digests = []
    for mpath in manifest_paths:
        manifest = load_manifest(mpath)
        if manifest.metric != "f1":
            raise ManifestError(
                f"{mpath}: training needs ground-truth masks "
                f"(metric f1), got metric {manifest.metric!r}")
        digests.append((mpath, _sha256(mpath)))
        for e in manifest.entries:
            entries.append(CorpusEntry(
                prediction=_load_prediction(_resolve(e.prediction, mpath), tau),
                ground_truth=decode_mask(_resolve(e.target, mpath)),
                dataset_id=manifest.dataset_id))
    return TrainingCorpus(entries=tuple(entries)), digests


def _holdout_path(out, dataset_id):
    root, ext = os.path.splitext(out)
    return f"{root}.{dataset_id}{ext or '.params'}"


def cmd_train(args):
    corpus, digests = _load_corpus(args.manifest, args.tau)
    grid = load_grid(args.grid) if args.grid else GridSpec()
    config = _config_from(args)
    n_points = sum(1 for _ in grid.points())
    for mpath, digest in digests:
        print(f"manifest {mpath} sha256={digest}")
    print(f"searching {n_points} grid points over {len(corpus)} examples")
    if args.leave_one_out:
        results = leave_one_dataset_out(grid, corpus, config, jobs=args.jobs)
        for dataset_id, (params, score) in results.items():
            path = _holdout_path(args.out, dataset_id)
            save_params(params, path)
            print(f"held_out={dataset_id}\tscore={score:.6f}\t"
                  f"a1={params.a1} a2={params.a2} b1={params.b1} "
                  f"b2={params.b2} c1={params.c1}\twrote {path}")
    else:
        params, score = grid_search(grid, corpus, config, jobs=args.jobs)
        save_params(params, args.out)
        print(f"score={score:.6f}\ta1={params.a1} a2={params.a2} "
              f"b1={params.b1} b2={params.b2} c1={params.c1}\t"
              f"wrote {args.out}")
    return 0


def _eval_report(args):
    manifest = load_manifest(args.manifest)
    lines = ["# eval report",
             f"# manifest {args.manifest} sha256={_sha256(args.manifest)}",
             f"dataset\t{manifest.dataset_id}",
             f"metric\t{manifest.metric}",
             f"images\t{len(manifest.entries)}"]

    def pred_path(e):
        if args.pred_dir:
            return os.path.join(args.pred_dir, os.path.basename(e.prediction))
        return _resolve(e.prediction, args.manifest)

    if manifest.metric == "ap":
        scores = []
        labels = []
        for e in manifest.entries:
            mask = _load_prediction(pred_path(e), args.tau)
            scores.append(foreground_count(mask) / (mask.width * mask.height))
            labels.append(e.target == manifest.positive)
        lines.append(f"positives\t{sum(labels)}")
        score = average_precision(scores, labels)
    else:
        total = ConfusionCounts()
        pooled = {}
        order = []
        for e in manifest.entries:
            pred = _load_prediction(pred_path(e), args.tau)
            truth = decode_mask(_resolve(e.target, args.manifest))
            counts = confusion(pred, truth)
            total = total + counts
            if manifest.grouped:
                if e.group not in pooled:
                    pooled[e.group] = ConfusionCounts()
                    order.append(e.group)
                pooled[e.group] = pooled[e.group] + counts
        lines += [f"tp\t{total.tp}", f"fp\t{total.fp}",
                  f"fn\t{total.fn}", f"tn\t{total.tn}"]
        if manifest.grouped:
            for key in order:
                lines.append(f"group\t{key}\t{f1(pooled[key]):.6f}")
            score = sum(f1(pooled[k]) for k in order) / len(order)
        else:
            score = f1(total)
    lines.append(f"score\t{score:.6f}")
    return lines


def cmd_eval(args):
    lines = _eval_report(args)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def _parse_table(path):
    rows = []
    header = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t") if "\t" in line else line.split()
            if header is None:
                if fields[0] != "dataset":
                    raise ManifestError(
                        f"{path}:{lineno}: first column must be 'dataset'")
                has_metric = len(fields) > 1 and fields[1] == "metric"
                methods = fields[2:] if has_metric else fields[1:]
                if not methods:
                    raise ManifestError(f"{path}:{lineno}: no method columns")
                header = (has_metric, methods)
                continue
            has_metric, methods = header
            want = len(methods) + (2 if has_metric else 1)
            if len(fields) != want:
                raise ManifestError(
                    f"{path}:{lineno}: expected {want} fields, "
                    f"got {len(fields)}")
            metric = fields[1] if has_metric else "f1"
            if metric not in ("f1", "ap"):
                raise ManifestError(
                    f"{path}:{lineno}: metric must be 'f1' or 'ap', "
                    f"got {metric!r}")
            try:
                values = [float(v) for v in fields[2 if has_metric else 1:]]
            except ValueError:
                raise ManifestError(
                    f"{path}:{lineno}: non-numeric score") from None
            rows.append((fields[0], metric, values))
    if header is None or not rows:
        raise ManifestError(f"{path}: no data rows")
    return header[1], rows


def cmd_compare(args):
    methods, rows = _parse_table(args.table)
    table = [values for _, _, values in rows]
    avg, final = global_rank(table)
    lines = ["# compare report",
             f"# table {args.table} sha256={_sha256(args.table)}",
             "methods\t" + "\t".join(methods),
             "avg_rank\t" + "\t".join(f"{v:.4f}" for v in avg),
             "rank\t" + "\t".join(f"{v:g}" for v in final)]
    # paired tests run on a common scale: ap rows are 0..100, f1 rows
    # 0..1, so ap scores are divided by 100 before differencing
    scaled = [[v / 100.0 for v in values] if metric == "ap" else values
              for _, metric, values in rows]
    for i in range(len(methods)):
        for j in range(i + 1, len(methods)):
            x = [row[i] for row in scaled]
            y = [row[j] for row in scaled]
            result = wilcoxon_signed_rank(x, y)
            verdict = ("significant" if result.p_value <= args.alpha
                       else "not-significant")
            lines.append(f"wilcoxon\t{methods[i]}\t{methods[j]}\t"
                         f"{result.p_value:.6f}\t{verdict}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 0


def cmd_classify(args):
    manifest = load_manifest(args.manifest)
    params = load_params(args.params)
    config = _config_from(args)
    for e in manifest.entries:
        pred = _load_prediction(_resolve(e.prediction, args.manifest), args.tau)
        c = classify(pred, params, config)
        feats = c.features
        cc = "-" if feats.cc is None else str(feats.cc)
        bsr = "-" if feats.bsr is None else f"{feats.bsr:.4f}"
        print(f"{os.path.basename(e.prediction)}\t"
              f"class={c.pattern_class}\tsr={feats.sr:.4f}\tcc={cc}\tbsr={bsr}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="skinmorph",
        description="morphological post-processing for skin detector masks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("postprocess", help="clean up detector masks")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--mode", choices=("adaptive", "baseline"),
                   default="adaptive")
    p.add_argument("--params", help="threshold params file (adaptive mode)")
    p.add_argument("--tau", type=int, default=None,
                   help="binarize probability-map predictions at this level")
    _add_config_flags(p)
    p.set_defaults(func=cmd_postprocess)

    p = sub.add_parser("train", help="fit thresholds by grid search")
    p.add_argument("--manifest", action="append", required=True,
                   help="training dataset manifest (repeatable)")
    p.add_argument("--out", required=True, help="params file to write")
    p.add_argument("--grid", help="grid file; omit for the default sweep")
    p.add_argument("--leave-one-out", action="store_true",
                   help="fit one params file per held-out dataset")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tau", type=int, default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pred-dir",
                   help="take predictions from here instead of the manifest "
                        "paths (matched by file name)")
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--out", help="write the report here as well")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="rank methods and test significance")
    p.add_argument("--table", required=True,
                   help="datasets-by-methods score table")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="write the report here as well")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("classify", help="print class decisions per mask")
    p.add_argument("--manifest", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--tau", type=int, default=None)
    _add_config_flags(p)
    p.set_defaults(func=cmd_classify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ManifestError, DecodeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
