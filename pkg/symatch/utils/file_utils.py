"""
File Utilities for Result Files
Writes and reads sweep and exhaustive-run results as JSON or CSV
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['p', 'LER', 'stderr', 'shots', 'failures', 'vertical_failures', 'horizontal_failures']
EXHAUSTIVE_COLUMNS = [
    'weight', 'patterns', 'tally', 'failures', 'failure_fraction', 'vertical', 'horizontal', 'any_logical',
    'vertical_fraction', 'horizontal_fraction', 'any_fraction',
]


class FileUtilsError(Exception):
    """Base exception for result file operations"""
    pass


def _columns_for(kind: str, records: Sequence[Dict[str, Any]]) -> List[str]:
    if kind == 'sweep':
        return SWEEP_COLUMNS
    if kind == 'exhaustive':
        return EXHAUSTIVE_COLUMNS
    keys: List[str] = []
    for record in records:
        keys.extend(key for key in record if key not in keys)
    return keys


def _parse_number(text: str) -> Any:
    if text == '':
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


class ResultFileManager:
    """
    Manager for result documents.

    A document is a mapping with 'kind' ('sweep' or 'exhaustive'), 'spec',
    'provenance' and a list of flat 'records'. JSON keeps everything; CSV
    keeps the plot-ready record columns only.
    """

    def __init__(self):
        self.logger = logging.getLogger(__name__)

    def write_json(self, document: Dict[str, Any], path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as fh:
            json.dump(document, fh, indent=2, sort_keys=True)
        self.logger.info(f"Wrote {len(document.get('records', []))} records to {path}")
        return path

    def write_csv(self, document: Dict[str, Any], path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        records = document.get('records', [])
        columns = _columns_for(document.get('kind', ''), records)
        with open(path, 'w', newline='', encoding='utf-8') as fh:
            writer = csv.DictWriter(fh, fieldnames=columns, extrasaction='ignore')
            writer.writeheader()
            for record in records:
                # repr keeps floats at full precision
                writer.writerow({key: repr(value) if isinstance(value, float) else value
                                 for key, value in record.items()})
        self.logger.info(f"Wrote {len(records)} rows to {path}")
        return path

    def read_json(self, path: Path) -> Dict[str, Any]:
        try:
            with open(path, 'r', encoding='utf-8') as fh:
                document = json.load(fh)
        except json.JSONDecodeError as e:
            raise FileUtilsError(f"{path} is not valid JSON: {e}")
        if not isinstance(document, dict) or 'records' not in document:
            raise FileUtilsError(f"{path} is not a symatch result document")
        return document

    def read_csv(self, path: Path) -> List[Dict[str, Any]]:
        with open(path, 'r', newline='', encoding='utf-8') as fh:
            return [
                {key: _parse_number(value) for key, value in row.items()}
                for row in csv.DictReader(fh)
            ]


def emit_results(document: Dict[str, Any], path: Path, fmt: Optional[str] = None) -> Path:
    """
    Write a result document.

    Args:
        document: Result document (see ResultFileManager)
        path: Output file
        fmt: 'json' or 'csv'; inferred from the suffix when omitted

    Returns:
        The written path
    """
    path = Path(path)
    fmt = (fmt or path.suffix.lstrip('.') or 'json').lower()
    manager = ResultFileManager()
    if fmt == 'json':
        return manager.write_json(document, path)
    if fmt == 'csv':
        return manager.write_csv(document, path)
    raise FileUtilsError(f"Unsupported result format '{fmt}'")


def load_results(path: Path) -> Dict[str, Any]:
    """Read a JSON result document, or wrap CSV rows in a bare document."""
    path = Path(path)
    manager = ResultFileManager()
    if path.suffix.lower() == '.csv':
        return {'kind': None, 'spec': None, 'provenance': None, 'records': manager.read_csv(path)}
    return manager.read_json(path)


def empty_document(kind: str) -> Dict[str, Any]:
    return {'kind': kind, 'spec': {}, 'provenance': {}, 'records': []}
