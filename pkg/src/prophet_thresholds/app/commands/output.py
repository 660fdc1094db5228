"""Writers for command results: JSON on stdout, CSV series to a file or stdout."""

import json
import sys
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel

CSV_FLOAT_FORMAT = "%.12g"


def emit_json(result: BaseModel | dict[str, Any]) -> None:
    if isinstance(result, BaseModel):
        text = result.model_dump_json(indent=2)
    else:
        text = json.dumps(result, indent=2)
    sys.stdout.write(text + "\n")


def write_csv(frame: pd.DataFrame, out: str) -> None:
    """Write with a header row and 12 significant digits; "-" means stdout."""
    if out == "-":
        frame.to_csv(sys.stdout, index=False, float_format=CSV_FLOAT_FORMAT)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
