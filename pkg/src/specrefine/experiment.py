"""Experiment orchestration: encode sweeps to CSV files and plot data.

Outputs per run (all under the configured output directory):

* ``rd_<engine>.csv``  - columns ``engine,qstep,rate_kbps,psnr_db``
* ``timing.csv``       - columns ``engine,qstep,frame,refine_ms``
* ``bd.csv``           - one row per refinement engine vs pure MC

RD and BD files are deterministic for a fixed config and input; the
timing file carries wall-clock measurements and is not expected to be
byte-stable across runs.  If an encode fails mid-sweep, the rows
finished so far are flushed together with a ``FAILURE`` marker row and
the error propagates.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .codec.encoder import QstepResult, encode_sequence
from .codec.metrics import RDPoint, bd_metrics
from .config import ExperimentConfig
from .videoio import read_sequence

_RD_HEADER = ("engine", "qstep", "rate_kbps", "psnr_db")
_TIMING_HEADER = ("engine", "qstep", "frame", "refine_ms")
_BD_HEADER = ("engine", "bd_rate_pct", "bd_psnr_db")


def _write_csv(path: Path, header: tuple[str, ...], rows: list[tuple]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as sink:
        writer = csv.writer(sink)
        writer.writerow(header)
        writer.writerows(rows)


def _failure_row(width: int, engine: str, error: Exception) -> tuple:
    note = str(error).replace(",", ";")
    return ("FAILURE", engine, note) + ("",) * max(0, width - 3)


def run_experiment(config: ExperimentConfig) -> dict[str, Path]:
    """Run every configured engine over the qstep ladder and write the
    result files.  Returns logical name -> written path."""
    sequence = read_sequence(config.input, config.width or None, config.height or None)
    frames = list(sequence.luma[: config.frames + 1])
    if len(frames) < 2:
        raise ValueError(
            f"{config.input}: need at least 2 frames, found {len(frames)}"
        )
    params = config.codec_params()
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    outputs: dict[str, Path] = {
        "timing": out_dir / "timing.csv",
        "bd": out_dir / "bd.csv",
    }
    timing_rows: list[tuple] = []
    bd_rows: list[tuple] = []
    curves: dict[str, list[RDPoint]] = {}

    for engine in config.engines:
        rd_path = out_dir / f"rd_{engine}.csv"
        outputs[f"rd_{engine}"] = rd_path
        rd_rows: list[tuple] = []
        points: list[RDPoint] = []
        try:
            for qstep in config.qsteps:
                outcome = encode_sequence(frames, engine, [qstep], params)
                result: QstepResult = outcome.results[0]
                points.append(result.point)
                rd_rows.append(
                    (engine, repr(float(qstep)),
                     repr(result.point.rate_kbps), repr(result.point.psnr_db))
                )
                timing_rows.extend(
                    (engine, repr(float(qstep)), s.frame_index, f"{s.refine_ms:.6f}")
                    for s in result.frame_stats
                )
        except Exception as exc:
            rd_rows.append(_failure_row(len(_RD_HEADER), engine, exc))
            _write_csv(rd_path, _RD_HEADER, rd_rows)
            _write_csv(outputs["timing"], _TIMING_HEADER, timing_rows)
            _write_csv(outputs["bd"], _BD_HEADER, bd_rows)
            raise
        _write_csv(rd_path, _RD_HEADER, rd_rows)
        curves[engine] = points

    anchor = curves.get("none")
    for engine in config.engines:
        if engine == "none" or anchor is None:
            continue
        try:
            rate_pct, psnr_db = bd_metrics(anchor, curves[engine])
        except Exception as exc:
            bd_rows.append(_failure_row(len(_BD_HEADER), engine, exc))
            _write_csv(outputs["timing"], _TIMING_HEADER, timing_rows)
            _write_csv(outputs["bd"], _BD_HEADER, bd_rows)
            raise
        bd_rows.append((engine, repr(rate_pct), repr(psnr_db)))

    _write_csv(outputs["timing"], _TIMING_HEADER, timing_rows)
    _write_csv(outputs["bd"], _BD_HEADER, bd_rows)
    return outputs


def emit_plot_data(csv_path: str | Path, out_dir: str | Path | None = None) -> list[Path]:
    """Reshape an RD CSV into one whitespace-separated ``.dat`` table
    per engine, rows sorted by ascending rate."""
    csv_path = Path(csv_path)
    target = Path(out_dir) if out_dir is not None else csv_path.parent
    target.mkdir(parents=True, exist_ok=True)

    per_engine: dict[str, list[tuple[float, float]]] = {}
    with open(csv_path, newline="", encoding="utf-8") as source:
        reader = csv.reader(source)
        header = next(reader, None)
        if header is None or tuple(header) != _RD_HEADER:
            raise ValueError(f"{csv_path}: expected header {','.join(_RD_HEADER)}")
        for row in reader:
            if not row or row[0] == "FAILURE":
                continue
            engine, _, rate, psnr_db = row
            per_engine.setdefault(engine, []).append((float(rate), float(psnr_db)))

    written = []
    for engine, rows in sorted(per_engine.items()):
        rows.sort()
        path = target / f"{csv_path.stem}_{engine}.dat"
        lines = ["# rate_kbps psnr_db"]
        lines += [f"{rate!r} {psnr_db!r}" for rate, psnr_db in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(path)
    return written
