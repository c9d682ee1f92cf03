"""I/O."""

from __future__ import annotations

import csv
from typing import Any, Iterable, Mapping, Sequence

import yaml

__all__ = ['dump_csv', 'dump_yaml', 'dump_yaml_str', 'load_yaml', 'read_text']


def read_text(path: str) -> str:
    """Read a UTF-8 text file.

    Args:
        path (str): The file to read.

    Returns:
        str: The content.

    """
    with open(path, 'r', encoding='utf-8') as fin:
        return fin.read()


def load_yaml(path: str) -> Any:
    """Load a YAML format file.

    Args:
        path (str): The YAML file to load.

    Returns:
        Any: The loaded YAML data.

    """
    with open(path, 'r', encoding='utf-8') as fin:
        data = yaml.safe_load(fin)
    return data


def dump_yaml_str(obj: Any) -> str:
    """Dump an object to YAML text with a stable layout.

    Key order is the insertion order of the mappings, so equal inputs give byte-identical text.

    Args:
        obj (Any): The object to dump.

    Returns:
        str: YAML text.

    """
    return yaml.safe_dump(obj, sort_keys=False, default_flow_style=False, allow_unicode=True, width=120)


def dump_yaml(obj: Any, path: str) -> None:
    """Dump an object in YAML format.

    Args:
        obj (Any): The object to dump.
        path (str): The file to dump the object to.

    """
    with open(path, 'w', encoding='utf-8') as fout:
        fout.write(dump_yaml_str(obj))


def dump_csv(rows: Iterable[Mapping[str, Any]], path: str, header: Sequence[str]) -> None:
    """Dump rows to a comma separated file with a header row.

    Args:
        rows (Iterable[Mapping[str, Any]]): One mapping per row. Missing keys are written as empty cells.
        path (str): The file to dump the rows to.
        header (Sequence[str]): Column names, in order.

    """
    with open(path, 'w', encoding='utf-8', newline='') as fout:
        writer = csv.DictWriter(fout, fieldnames=list(header), extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
