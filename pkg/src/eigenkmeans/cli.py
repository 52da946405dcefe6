"""Command-line interface: ``ekm train|recognize|evaluate|export-eigenfaces``.

Exit codes: 0 success (recognize: known), 2 recognize verdict unknown, 1 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import __version__
from .dataset import DatasetError, scan, synth_dataset
from .evaluation import TABLE1_ROWS, TABLE2_ROWS, report_render, run_case_study_1, run_case_study_2
from .imageio import PGMError, read_pgm, to_display_image, vectorize, write_pgm
from .linalg import ConvergenceError, DimensionError
from .persistence import ModelFormatError, load_model, save_model
from .recognizer import recognize
from .trainer import DegenerateTrainingSetError, TrainerConfig, TrainingSet, train

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _data_dir(args) -> Path:
    path = args.data or os.environ.get("EKM_DATA_DIR")
    if not path:
        raise UsageError("no dataset given: pass --data or set EKM_DATA_DIR")
    return Path(path)


def _trainer_config(args) -> TrainerConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(json.loads(Path(args.config).read_text()))
    if getattr(args, "eigenfaces", None) is not None:
        values["requested_E"] = args.eigenfaces
    if getattr(args, "cutoff", None) is not None:
        values["positive_cutoff"] = args.cutoff
    return TrainerConfig.from_mapping(values)


def cmd_train(args) -> int:
    manifest = scan(_data_dir(args))
    ts = TrainingSet(
        {lab: [s.vector for s in samples] for lab, samples in manifest.classes.items()},
        manifest.image_dims,
    )
    model = train(ts, _trainer_config(args))
    save_model(model, args.out)
    print(
        f"trained classes={model.num_classes} images={len(ts)} "
        f"eigenfaces={model.num_eigenfaces} out={args.out}"
    )
    return EXIT_OK


def cmd_recognize(args) -> int:
    model = load_model(args.model)
    img = read_pgm(args.image)
    if img.dims != model.image_dims:
        w, h = model.image_dims
        raise DimensionError(
            f"probe image is {img.width}x{img.height}, model expects {w}x{h}"
        )
    result = recognize(model, vectorize(img), args.threshold)
    print(result.format_line())
    return EXIT_OK if result.known else EXIT_UNKNOWN


def cmd_evaluate(args) -> int:
    if args.synthetic:
        manifest = synth_dataset(40, 10, args.synthetic_dim, args.synthetic_noise, seed=1)
    else:
        manifest = scan(_data_dir(args))
    table = TABLE1_ROWS if args.protocol == "cs1" else TABLE2_ROWS
    if args.paper_nii:
        rows = [(param, nii) for param, nii, _ in table]
    else:
        rows = [(param, args.nii) for param, _, _ in table]
    seeds = range(1, args.seeds + 1)
    cfg = _trainer_config(args)
    if args.protocol == "cs1":
        report = run_case_study_1(manifest, rows, seeds, cfg, workers=args.workers)
    else:
        report = run_case_study_2(manifest, rows, seeds, cfg, workers=args.workers)
    text, records = report_render(report)
    out = text + "\n".join(records) + ("\n" if records else "")
    sys.stdout.write(out)
    if args.out:
        Path(args.out).write_text(out)
    return EXIT_OK


def cmd_export(args) -> int:
    model = load_model(args.model)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    width, height = model.image_dims
    digits = max(3, len(str(model.num_eigenfaces)))
    for i in range(model.num_eigenfaces):
        path = out_dir / f"eigenface_{i + 1:0{digits}d}_minmax255.pgm"
        write_pgm(path, to_display_image(model.eigenfaces[:, i], width, height))
    write_pgm(out_dir / "meanface_minmax255.pgm", to_display_image(model.mean_face, width, height))
    print(f"wrote {model.num_eigenfaces} eigenfaces to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ekm", description="Eigenface + mean-shift face recognition")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a model from an ORL-style directory")
    p.add_argument("--data", help="dataset root (default: $EKM_DATA_DIR)")
    p.add_argument("--eigenfaces", type=int, help="number of eigenfaces to keep (default: all)")
    p.add_argument("--cutoff", type=float, help="relative eigenvalue cutoff (default 1e-10)")
    p.add_argument("--config", help="JSON file with trainer options")
    p.add_argument("--out", required=True, help="output model file (.ekm)")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("recognize", help="identify one probe image")
    p.add_argument("--model", required=True)
    p.add_argument("--image", required=True, help="probe PGM")
    p.add_argument("--threshold", type=float, default=math.inf,
                   help="accept as known if D_min <= threshold (default: inf)")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("evaluate", help="run a case-study protocol over seeded splits")
    p.add_argument("--data", help="dataset root (default: $EKM_DATA_DIR)")
    p.add_argument("--protocol", choices=["cs1", "cs2"], required=True)
    p.add_argument("--seeds", type=int, default=10, help="number of random splits per row")
    nii = p.add_mutually_exclusive_group()
    nii.add_argument("--nii", type=int, help="probe images sampled per split (default: all)")
    nii.add_argument("--paper-nii", action="store_true",
                     help="use the published per-row probe counts")
    p.add_argument("--eigenfaces", type=int)
    p.add_argument("--cutoff", type=float)
    p.add_argument("--config", help="JSON file with trainer options")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--synthetic", action="store_true",
                   help="use a generated 40x10 dataset instead of --data")
    p.add_argument("--synthetic-dim", type=int, default=256)
    p.add_argument("--synthetic-noise", type=float, default=160.0)
    p.add_argument("--out", help="also write the report to this file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-eigenfaces", help="write eigenfaces as PGM images")
    p.add_argument("--model", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ekm: {exc}", file=sys.stderr)
    except (OSError, PGMError, DatasetError, DimensionError, ModelFormatError,
            DegenerateTrainingSetError, ConvergenceError, ValueError) as exc:
        print(f"ekm {args.command}: error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
