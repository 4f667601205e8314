"""Command-line front end.

Exit codes:
    0  success
    1  usage error
    2  unreadable or invalid input image
    3  invalid or missing key file
    4  non-square image
    5  chaotic trajectory diverged for this key
    6  weak key refused (override with --allow-weak-key)
    7  dimension mismatch between analyzed images
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import arnold
from .analysis import analyze
from .cipher import KEY_FIELDS, CipherKey, decrypt, encrypt, weak_key_reason
from .hyperchaos import ChaosParams, TrajectoryDivergedError, export_binary, export_csv, generate_keystreams
from .imagecore import ImageFormatError, gray_value_sum, load_image, save_image

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IMAGE = 2
EXIT_KEY = 3
EXIT_NON_SQUARE = 4
EXIT_DIVERGED = 5
EXIT_WEAK_KEY = 6
EXIT_DIM_MISMATCH = 7

KEYFILE_ENV = "CHAOCIPHER_KEYFILE"

log = logging.getLogger("chaocipher")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_key(data: dict) -> CipherKey:
    """Build a key from the flat JSON mapping; reals may be strings or numbers."""
    if not isinstance(data, dict):
        raise ValueError("key file must contain a JSON object")
    missing = [f for f in KEY_FIELDS if f not in data]
    if missing:
        raise ValueError(f"key file is missing {', '.join(missing)}")
    reals = {}
    for name in ChaosParams.FIELDS:
        raw = data[name]
        if isinstance(raw, bool) or not isinstance(raw, (str, int, float)):
            raise ValueError(f"{name} must be a decimal string or number")
        reals[name] = float(raw)
    c0 = data["c0"]
    if isinstance(c0, str) and c0.strip().isdigit():
        c0 = int(c0)
    if isinstance(c0, bool) or not isinstance(c0, int):
        raise ValueError("c0 must be an integer in [0, 255]")
    return CipherKey(ChaosParams(**reals), c0)


def key_to_json(key: CipherKey) -> str:
    data = {name: repr(getattr(key.chaos, name)) for name in ChaosParams.FIELDS}
    data["c0"] = key.c0
    return json.dumps(data, indent=2) + "\n"


def read_key(path: str | None) -> CipherKey:
    path = path or os.environ.get(KEYFILE_ENV)
    if not path:
        raise CliError(f"no key file given (use --key or set {KEYFILE_ENV})", EXIT_KEY)
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_key(json.load(fh))
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
        raise CliError(f"invalid key file {path}: {exc}", EXIT_KEY) from exc


def _check_key_policy(key: CipherKey, allow_weak: bool) -> None:
    try:
        reason = weak_key_reason(key)
    except TrajectoryDivergedError as exc:
        raise CliError(f"key unusable: {exc}", EXIT_DIVERGED) from exc
    if reason is None:
        return
    if not allow_weak:
        raise CliError(f"weak key refused: {reason}", EXIT_WEAK_KEY)
    log.warning("weak key accepted: %s", reason)


def _load(path: str):
    try:
        return load_image(path)
    except ImageFormatError as exc:
        raise CliError(str(exc), EXIT_IMAGE) from exc


def _save(img, path: str) -> None:
    try:
        save_image(img, path)
    except ImageFormatError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def _run_cipher(args, fn) -> int:
    key = read_key(args.key)
    img = _load(args.input)
    if not img.is_square:
        raise CliError(f"{args.input}: image is {img.height}x{img.width}, must be square", EXIT_NON_SQUARE)
    _check_key_policy(key, args.allow_weak_key)
    if fn is encrypt:
        log.info("Arnold parameters (a, b, c, d, n) = %s",
                 arnold.derive_params(gray_value_sum(img)).as_tuple())
    try:
        out = fn(img, key)
    except TrajectoryDivergedError as exc:
        raise CliError(str(exc), EXIT_DIVERGED) from exc
    if fn is decrypt:
        log.info("recovered Arnold parameters (a, b, c, d, n) = %s",
                 arnold.derive_params(gray_value_sum(out)).as_tuple())
    _save(out, args.output)
    return EXIT_OK


def cmd_encrypt(args) -> int:
    return _run_cipher(args, encrypt)


def cmd_decrypt(args) -> int:
    return _run_cipher(args, decrypt)


def cmd_analyze(args) -> int:
    key = read_key(args.key) if args.key else None
    plain = _load(args.plain)
    cipher = _load(args.cipher)
    if plain.shape != cipher.shape:
        raise CliError(f"dimension mismatch: {plain.shape} vs {cipher.shape}", EXIT_DIM_MISMATCH)
    report = analyze(plain, cipher, key, seed=args.seed)
    text = report.to_json()
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    if args.table:
        sys.stderr.write(report.to_table())
    return EXIT_OK


def cmd_keystream(args) -> int:
    if args.length < 1:
        raise CliError("length must be at least 1", EXIT_USAGE)
    key = read_key(args.key)
    _check_key_policy(key, args.allow_weak_key)
    try:
        pair = generate_keystreams(key.chaos, args.length)
    except TrajectoryDivergedError as exc:
        raise CliError(str(exc), EXIT_DIVERGED) from exc
    if args.format == "bin":
        payload = export_binary(pair)
        if args.output == "-":
            sys.stdout.buffer.write(payload)
        else:
            Path(args.output).write_bytes(payload)
    else:
        text = export_csv(pair)
        if args.output == "-":
            sys.stdout.write(text)
        else:
            Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chaocipher", description="Chaos-based color image cipher.")
    parser.add_argument("--verbose", "-v", action="store_true", help="diagnostics on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def key_opts(p):
        p.add_argument("--key", metavar="PATH", help=f"JSON key file (default: ${KEYFILE_ENV})")
        p.add_argument("--allow-weak-key", action="store_true", help="accept keys that fail the quality check")

    for name, fn, help_ in (("encrypt", cmd_encrypt, "encrypt an image"),
                            ("decrypt", cmd_decrypt, "decrypt an image")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("input")
        p.add_argument("output", help="output file; .png or .ppm (default PPM)")
        key_opts(p)
        p.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(func=fn)

    p = sub.add_parser("analyze", help="write a JSON metrics report")
    p.add_argument("plain")
    p.add_argument("cipher")
    p.add_argument("--out", "-o", dest="output", default="-", metavar="PATH", help="report path (default stdout)")
    p.add_argument("--key", metavar="PATH", help="key file; enables key-sensitivity measurements")
    p.add_argument("--seed", type=int, default=0, help="correlation sampling seed")
    p.add_argument("--table", action="store_true", help="also print a text table to stderr")
    p.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("keystream", help="export the K1/K2 keystreams")
    p.add_argument("length", type=int)
    p.add_argument("output", nargs="?", default="-")
    p.add_argument("--format", choices=("bin", "csv"), default="csv")
    key_opts(p)
    p.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_keystream)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
