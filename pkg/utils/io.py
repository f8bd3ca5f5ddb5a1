"""File I/O utilities."""

import json
from pathlib import Path
from typing import Any, List

import numpy as np


def _default(value: Any):
    """JSON fallback for complex numbers and numpy values."""
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist() if not np.iscomplexobj(value) else matrix_to_json(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def save_json(data: Any, file_path: Path):
    """
    Save data as JSON file.
    
    Args:
        data: Data to save; complex values are written as [re, im]
        file_path: Path to save file
    """
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False, default=_default)
    except Exception as e:
        print(f"Error saving JSON: {e}")
        raise


def load_json(file_path: Path) -> Any:
    """
    Load data from JSON file.
    
    Args:
        file_path: Path to JSON file
        
    Returns:
        Loaded data
    """
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except Exception as e:
        print(f"Error loading JSON: {e}")
        raise


def matrix_to_json(matrix: np.ndarray) -> List[List[List[float]]]:
    """
    Row-major nested list of [re, im] pairs.
    
    Args:
        matrix: 2-d complex array
        
    Returns:
        JSON-ready nested list
    """
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    return [[[float(x.real), float(x.imag)] for x in row] for row in matrix]


def matrix_from_json(data: List[List[List[float]]]) -> np.ndarray:
    """Inverse of matrix_to_json."""
    array = np.asarray(data, dtype=float)
    return array[..., 0] + 1j * array[..., 1]


def format_complex(value: complex, digits: int = 12) -> str:
    """Render a complex number as 're+imi'."""
    re, im = float(value.real), float(value.imag)
    if re == 0:
        re = 0.0
    if im == 0:
        im = 0.0
    sign = "-" if np.signbit(im) else "+"
    return f"{re:.{digits}g}{sign}{abs(im):.{digits}g}i"


def to_jsonable(value: Any) -> Any:
    """Recursively replace complex and numpy values by JSON-ready ones."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (complex, np.complexfloating, np.integer, np.floating, np.ndarray)):
        return _default(value)
    return value
