"""
Code Registry
Creates and manages the bivariate bicycle codes known to symatch
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import yaml

from ..config.settings import BUNDLED_CODES_FILE
from .bb_code import BBCode, build_code
from .errors import SymatchError
from .lattice import LatticePoly, TorusShape, parse_exponents

logger = logging.getLogger(__name__)


class UnknownCode(SymatchError):
    """Raised when a code name is not registered"""
    pass


@dataclass(frozen=True)
class CodeSpec:
    """Registry row: polynomials as text, torus shape and [[n, k, d]]."""

    name: str
    a_text: str
    b_text: str
    shape: TorusShape
    n: int
    k: int
    d: Optional[int] = None
    description: str = ""
    distance_caveat: Optional[str] = None
    aliases: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def parameters(self) -> str:
        distance = "?" if self.d is None else str(self.d)
        if self.distance_caveat:
            distance += "*"
        return f"[[{self.n},{self.k},{distance}]]"

    def build(self) -> BBCode:
        A = LatticePoly.parse(self.a_text, self.shape)
        B = LatticePoly.parse(self.b_text, self.shape)
        return build_code(
            A, B, self.shape,
            name=self.name,
            distance=self.d,
            distance_caveat=self.distance_caveat,
            planar_a=parse_exponents(self.a_text),
            planar_b=parse_exponents(self.b_text),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'name': self.name,
            'description': self.description,
            'A': self.a_text,
            'B': self.b_text,
            'shape': [self.shape.M, self.shape.N, self.shape.alpha],
            'n': self.n,
            'k': self.k,
            'd': self.d,
        }
        if self.distance_caveat:
            data['distance-caveat'] = self.distance_caveat
        if self.aliases:
            data['aliases'] = list(self.aliases)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CodeSpec':
        try:
            M, N, alpha = data['shape']
            return cls(
                name=str(data['name']),
                a_text=str(data['A']),
                b_text=str(data['B']),
                shape=TorusShape(int(M), int(N), int(alpha)),
                n=int(data['n']),
                k=int(data['k']),
                d=None if data.get('d') is None else int(data['d']),
                description=data.get('description', ''),
                distance_caveat=data.get('distance-caveat'),
                aliases=tuple(data.get('aliases', ())),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"Invalid code entry {data!r}: {e}")

    def __str__(self) -> str:
        return f"{self.name} {self.parameters} ({self.shape}) A={self.a_text} B={self.b_text}"


def toric_spec(l: int) -> CodeSpec:
    return CodeSpec(
        name=f"TC{l}", a_text="1 + x", b_text="1 + y",
        shape=TorusShape(l, l, 0), n=2 * l * l, k=2, d=l,
        description=f"Toric code (l = {l})",
    )


def color_spec(l: int) -> CodeSpec:
    if l % 3:
        raise ValueError(f"Toric color codes need l divisible by 3, got {l}")
    return CodeSpec(
        name=f"CC{l}", a_text="1 + x + y", b_text="1 + y + x^-1*y",
        shape=TorusShape(l, l, 0), n=2 * l * l, k=4, d=4 * l // 3,
        description=f"Color code on a torus (l = {l})",
    )


class CodeRegistry:
    """
    Registry of named codes.

    The bundled YAML file is loaded on first use; further files with the
    same schema can be merged with load_yaml. Names TC<l> and CC<l> build
    toric and color codes of any size.
    """

    _specs: Dict[str, CodeSpec] = {}
    _aliases: Dict[str, str] = {}
    _built: Dict[str, BBCode] = {}
    _families = {'TC': toric_spec, 'CC': color_spec}

    @classmethod
    def _ensure_loaded(cls):
        if not cls._specs:
            cls.load_yaml(BUNDLED_CODES_FILE)

    @classmethod
    def load_yaml(cls, path: Path) -> List[CodeSpec]:
        """
        Register every code listed in a YAML file.

        Args:
            path: File with a top-level 'codes' list

        Returns:
            The registered specs
        """
        with open(path, 'r', encoding='utf-8') as fh:
            document = yaml.safe_load(fh) or {}

        specs = [CodeSpec.from_dict(entry) for entry in document.get('codes', [])]
        for spec in specs:
            cls.register_code(spec)
        logger.debug(f"Loaded {len(specs)} codes from {path}")
        return specs

    @classmethod
    def register_code(cls, spec: CodeSpec):
        cls._specs[spec.name] = spec
        cls._built.pop(spec.name, None)
        for alias in spec.aliases:
            cls._aliases[alias.lower()] = spec.name

    @classmethod
    def get_available_codes(cls) -> Dict[str, CodeSpec]:
        cls._ensure_loaded()
        return dict(cls._specs)

    @classmethod
    def resolve_name(cls, name: str) -> str:
        cls._ensure_loaded()
        if name in cls._specs:
            return name
        return cls._aliases.get(name.lower(), name)

    @classmethod
    def get_spec(cls, name: str) -> CodeSpec:
        """
        Look up a code specification.

        Raises:
            UnknownCode: If the name is neither registered nor a family name
        """
        resolved = cls.resolve_name(name)
        if resolved in cls._specs:
            return cls._specs[resolved]

        match = re.fullmatch(r'(TC|CC)(\d+)', resolved)
        if match:
            return cls._families[match.group(1)](int(match.group(2)))

        available = sorted(cls._specs)
        raise UnknownCode(f"Unknown code '{name}'. Available: {available}")

    @classmethod
    def create_code(cls, name: str) -> BBCode:
        spec = cls.get_spec(name)
        if spec.name not in cls._built:
            cls._built[spec.name] = spec.build()
            logger.info(f"Built code {spec}")
        return cls._built[spec.name]

    @classmethod
    def is_code_available(cls, name: str) -> bool:
        try:
            cls.get_spec(name)
            return True
        except (UnknownCode, ValueError):
            return False


def create_code(name: str = 'gross') -> BBCode:
    """Convenience wrapper around CodeRegistry.create_code."""
    return CodeRegistry.create_code(name)
