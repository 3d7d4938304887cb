# cristalq/services/exact_arith.py
"""
Aritmética exacta de CristalQ.

Contiene:
  - Racionales (fractions.Fraction) y su formato de texto "p/q".
  - QuadElem: elementos a + b·√−D de un cuerpo cuadrático imaginario.
  - quad_sign_real: signo exacto de p + q·√d, y con él los predicados
    de orientación y cruce de segmentos en el plano.
  - Formas normales de Smith y Hermite (sympy, sobre ZZ), núcleo
    entero y saturación de retículos.
  - squarefree_part con sympy.factorint.

Nada de este módulo usa punto flotante salvo to_complex(), que sólo
se usa para dibujar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import sympy
from sympy.matrices.normalforms import hermite_normal_form as sympy_hermite_normal_form
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp

from cristalq.errors import DivisionByZero, InvalidFile, MixedFields, NonPositive

IntMatrix = List[List[int]]
RationalLike = Union[int, Fraction]


# ----------------------------
# Racionales
# ----------------------------

def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """
    Convierte "p/q", "p" o un entero en Fraction.
    No acepta decimales: "0.5" es un error de archivo.
    """
    if isinstance(value, bool):
        raise InvalidFile(f"Valor racional inválido: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    text = str(value).strip()
    numerator, _, denominator = text.partition("/")
    try:
        num = int(numerator)
        den = int(denominator) if denominator else 1
    except ValueError as exc:
        raise InvalidFile(f"Valor racional inválido: {value!r}") from exc
    if den == 0:
        raise InvalidFile(f"Denominador cero en {value!r}")
    return Fraction(num, den)


def format_rational(value: RationalLike) -> str:
    """Siempre con denominador: 48 -> "48/1"."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def fraction_from_sympy(value: object) -> Fraction:
    """Pasa un Rational/Integer de sympy a Fraction sin pasar por float."""
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def common_denominator(values: Iterable[Fraction]) -> int:
    denominator = 1
    for value in values:
        denominator = math.lcm(denominator, Fraction(value).denominator)
    return denominator


# ----------------------------
# Parte libre de cuadrados
# ----------------------------

def squarefree_part(n: int) -> int:
    """
    Mayor divisor libre de cuadrados d de n tal que n/d es un cuadrado.
    Ej: 108 = 36·3 -> 3.
    """
    if n <= 0:
        raise NonPositive(f"squarefree_part necesita un entero positivo (recibí {n}).")
    result = 1
    for prime, exponent in sympy.factorint(n).items():
        if exponent % 2:
            result *= int(prime)
    return result


def is_squarefree(n: int) -> bool:
    return n >= 1 and squarefree_part(n) == n


# ----------------------------
# Cuerpo cuadrático imaginario
# ----------------------------

@dataclass(frozen=True)
class QuadElem:
    """
    Elemento a + b·√−d de Q(√−d).

    Un elemento con b = 0 es racional y opera con cualquier d; dos
    elementos irracionales sólo operan si comparten d.
    """

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.d < 1:
            raise NonPositive(f"El radicando D debe ser >= 1 (recibí {self.d}).")

    # --- constructores ---

    @classmethod
    def rational(cls, value: RationalLike, d: int = 1) -> "QuadElem":
        return cls(Fraction(value), Fraction(0), d)

    @classmethod
    def from_radicand(
        cls,
        a: RationalLike,
        b: RationalLike,
        radicand: int,
    ) -> "QuadElem":
        """
        a + b·√−radicand con radicand arbitrario; lo lleva a D libre de
        cuadrados (√−12 = 2·√−3).
        """
        core = squarefree_part(radicand)
        factor = math.isqrt(radicand // core)
        return cls(Fraction(a), Fraction(b) * factor, core)

    # --- consultas ---

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def conj(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.d)

    def norm_sq(self) -> Fraction:
        """|z|² = a² + D·b²."""
        return self.a * self.a + self.d * self.b * self.b

    def to_complex(self) -> complex:
        return complex(float(self.a), float(self.b) * math.sqrt(self.d))

    # --- aritmética ---

    def _field_with(self, other: "QuadElem") -> int:
        if self.b == 0:
            return other.d
        if other.b == 0 or other.d == self.d:
            return self.d
        raise MixedFields(
            f"No se pueden combinar elementos de Q(√−{self.d}) y Q(√−{other.d})."
        )

    def _coerce(self, other: object) -> Optional["QuadElem"]:
        if isinstance(other, QuadElem):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadElem.rational(other, self.d)
        return None

    def __add__(self, other: object) -> "QuadElem":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return QuadElem(self.a + rhs.a, self.b + rhs.b, self._field_with(rhs))

    __radd__ = __add__

    def __neg__(self) -> "QuadElem":
        return QuadElem(-self.a, -self.b, self.d)

    def __sub__(self, other: object) -> "QuadElem":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> "QuadElem":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> "QuadElem":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        d = self._field_with(rhs)
        # (a1 + b1·s)(a2 + b2·s) con s² = −d
        return QuadElem(
            self.a * rhs.a - d * self.b * rhs.b,
            self.a * rhs.b + self.b * rhs.a,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        norm = self.norm_sq()
        if norm == 0:
            raise DivisionByZero("División por cero en Q(√−D).")
        return QuadElem(self.a / norm, -self.b / norm, self.d)

    def __truediv__(self, other: object) -> "QuadElem":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        self._field_with(rhs)
        return self * rhs.inverse()

    def __rtruediv__(self, other: object) -> "QuadElem":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs / self

    # --- igualdad / hash ---

    def __eq__(self, other: object) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if self.a != rhs.a or self.b != rhs.b:
            return False
        return self.b == 0 or self.d == rhs.d

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.d if self.b else 0))

    def __repr__(self) -> str:
        return f"QuadElem({self.a}, {self.b}, {self.d})"

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        root = "√−1" if self.d == 1 else f"√−{self.d}"
        imaginary = root if self.b == 1 else f"-{root}" if self.b == -1 else f"{self.b}·{root}"
        if self.a == 0:
            return imaginary
        sign = "" if imaginary.startswith("-") else "+"
        return f"{self.a}{sign}{imaginary}"

    # --- JSON ---

    def to_json(self) -> dict:
        return {"a": format_rational(self.a), "b": format_rational(self.b), "D": self.d}

    @classmethod
    def from_json(cls, payload: dict) -> "QuadElem":
        return cls.from_radicand(
            parse_rational(payload["a"]),
            parse_rational(payload["b"]),
            int(payload["D"]),
        )


def quad_add(x: QuadElem, y: QuadElem) -> QuadElem:
    return x + y


def quad_mul(x: QuadElem, y: QuadElem) -> QuadElem:
    return x * y


def quad_div(x: QuadElem, y: QuadElem) -> QuadElem:
    return x / y


def quad_conj(x: QuadElem) -> QuadElem:
    return x.conj()


def quad_norm_sq(x: QuadElem) -> Fraction:
    return x.norm_sq()


def common_field(values: Iterable[QuadElem]) -> Optional[int]:
    """
    D compartido por los elementos irracionales, o None si todos son
    racionales. Lanza MixedFields si hay dos D distintos.
    """
    found: Optional[int] = None
    for value in values:
        if value.b == 0:
            continue
        if found is None:
            found = value.d
        elif found != value.d:
            raise MixedFields(f"Coordenadas en Q(√−{found}) y Q(√−{value.d}).")
    return found


# ----------------------------
# Predicado de signo exacto
# ----------------------------

def _sign(value: RationalLike) -> int:
    return (value > 0) - (value < 0)


def quad_sign_real(p: RationalLike, q: RationalLike, d: int) -> int:
    """
    Signo del número real p + q·√d, sin flotantes.

    Si p y q tienen el mismo signo gana ese signo; si no, decide la
    comparación de p² con q²·d.
    """
    sign_p, sign_q = _sign(p), _sign(q)
    if sign_q == 0:
        return sign_p
    if sign_p == 0 or sign_p == sign_q:
        return sign_q
    gap = Fraction(p) ** 2 - Fraction(q) ** 2 * d
    if gap == 0:
        return 0
    return sign_p if gap > 0 else sign_q


# ----------------------------
# Predicados en el plano
# ----------------------------
#
# Un punto a + b·√−D se dibuja en (a, b·√D). Productos cruzados y
# escalares de dos diferencias quedan de la forma q·√D y racional.

def cross_sign(u: QuadElem, v: QuadElem, d: int) -> int:
    return quad_sign_real(0, u.a * v.b - u.b * v.a, d)


def planar_dot(u: QuadElem, v: QuadElem, d: int) -> Fraction:
    return u.a * v.a + d * u.b * v.b


def orientation(p: QuadElem, q: QuadElem, r: QuadElem, d: int) -> int:
    return cross_sign(q - p, r - p, d)


def _within(p: QuadElem, q: QuadElem, x: QuadElem, d: int) -> bool:
    """x (alineado con pq) cae en el segmento cerrado pq."""
    return planar_dot(x - p, x - q, d) <= 0


def collinear_overlap(
    p1: QuadElem, p2: QuadElem, q1: QuadElem, q2: QuadElem, d: int
) -> bool:
    """[p1, p2] y [q1, q2] están sobre la misma recta y comparten un tramo de largo > 0."""
    if p1 == p2 or orientation(p1, p2, q1, d) or orientation(p1, p2, q2, d):
        return False
    axis = p2 - p1
    length = planar_dot(axis, axis, d)
    t1 = planar_dot(q1 - p1, axis, d) / length
    t2 = planar_dot(q2 - p1, axis, d) / length
    return max(Fraction(0), min(t1, t2)) < min(Fraction(1), max(t1, t2))


def segments_conflict(
    p1: QuadElem, p2: QuadElem, q1: QuadElem, q2: QuadElem, d: int
) -> bool:
    """
    True si los segmentos [p1, p2] y [q1, q2] se cortan en algo más que
    un extremo común a ambos.
    """
    o1, o2 = orientation(p1, p2, q1, d), orientation(p1, p2, q2, d)
    o3, o4 = orientation(q1, q2, p1, d), orientation(q1, q2, p2, d)

    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and o2 == 0:
        return collinear_overlap(p1, p2, q1, q2, d)

    touching = []
    if o1 == 0 and _within(p1, p2, q1, d):
        touching.append(q1)
    if o2 == 0 and _within(p1, p2, q2, d):
        touching.append(q2)
    if o3 == 0 and _within(q1, q2, p1, d):
        touching.append(p1)
    if o4 == 0 and _within(q1, q2, p2, d):
        touching.append(p2)
    return any(x not in (p1, p2) or x not in (q1, q2) for x in touching)


# ----------------------------
# Matrices enteras
# ----------------------------

def identity(size: int) -> IntMatrix:
    return [[int(i == j) for j in range(size)] for i in range(size)]


def mat_mul(left: Sequence[Sequence[int]], right: Sequence[Sequence[int]]) -> IntMatrix:
    inner = len(right)
    cols = len(right[0]) if inner else 0
    return [
        [sum(row[k] * right[k][j] for k in range(inner)) for j in range(cols)]
        for row in left
    ]


def determinant(matrix: Sequence[Sequence[RationalLike]]) -> Fraction:
    """Determinante exacto (Bareiss de sympy). La matriz vacía vale 1."""
    if not matrix:
        return Fraction(1)
    return fraction_from_sympy(sympy.Matrix(matrix).det(method="bareiss"))


def rational_rank(rows: Sequence[Sequence[RationalLike]]) -> int:
    if not rows or not rows[0]:
        return 0
    return int(sympy.Matrix(rows).rank())


def _as_lists(matrix: sympy.Matrix) -> IntMatrix:
    return [[int(matrix[i, j]) for j in range(matrix.cols)] for i in range(matrix.rows)]


def smith_normal_form(
    matrix: Sequence[Sequence[int]],
    cols: Optional[int] = None,
) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Forma normal de Smith con transformaciones: devuelve (U, S, V) con
    U·m·V = S, S diagonal con d1 | d2 | ... y d_i >= 0, U y V unimodulares.

    La descomposición la hace sympy (smith_normal_decomp sobre ZZ); acá
    sólo se pasa a listas de int y se fija el signo de la diagonal.
    `cols` hace falta sólo cuando la matriz no tiene filas.
    """
    rows = [[int(x) for x in row] for row in matrix]
    n_cols = len(rows[0]) if rows else (cols or 0)
    if not rows or not n_cols:
        return identity(len(rows)), [[0] * n_cols for _ in rows], identity(n_cols)

    diagonal, left, right = smith_normal_decomp(sympy.Matrix(rows), domain=sympy.ZZ)
    diagonal, left, right = _as_lists(diagonal), _as_lists(left), _as_lists(right)
    for i in range(min(len(rows), n_cols)):
        if diagonal[i][i] < 0:
            diagonal[i] = [-x for x in diagonal[i]]
            left[i] = [-x for x in left[i]]
    return left, diagonal, right


def smith_invariants(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> List[int]:
    """Factores invariantes no nulos."""
    rows = [[int(x) for x in row] for row in matrix]
    if not rows or not rows[0]:
        return []
    factors = invariant_factors(sympy.Matrix(rows), domain=sympy.ZZ)
    return [abs(int(f)) for f in factors if f]


def hermite_normal_form(matrix: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    """
    Forma normal de Hermite por filas del retículo generado por las filas.

    Pivotes positivos en columnas estrictamente crecientes, entradas por
    encima de cada pivote en [0, pivote), filas nulas descartadas. Es
    canónica: dos familias generan el mismo retículo sii dan la misma HNF.

    sympy calcula la HNF por columnas (pivotes de abajo hacia arriba);
    con las coordenadas invertidas y leída de atrás para adelante es
    exactamente la forma por filas de arriba.
    """
    rows = [[int(x) for x in row] for row in matrix]
    if not any(any(row) for row in rows):
        return ()
    flipped = sympy.Matrix([row[::-1] for row in rows]).T
    columns = sympy_hermite_normal_form(flipped)
    return tuple(
        tuple(int(columns[i, j]) for i in reversed(range(columns.rows)))
        for j in reversed(range(columns.cols))
    )


def integer_kernel(matrix: Sequence[Sequence[int]], cols: Optional[int] = None) -> List[Tuple[int, ...]]:
    """
    ℤ-base del retículo {x ∈ ℤⁿ : m·x = 0}: las columnas de V (de la
    forma de Smith) que caen sobre columnas nulas de S.
    """
    _, diagonal, right = smith_normal_form(matrix, cols)
    n_cols = len(right)
    return [
        tuple(right[i][j] for i in range(n_cols))
        for j in range(n_cols)
        if not any(row[j] for row in diagonal)
    ]


def saturation(rows: Sequence[Sequence[int]], cols: int) -> Tuple[Tuple[int, ...], ...]:
    """
    HNF de la saturación (ℚ·L) ∩ ℤⁿ del retículo generado por `rows`.
    Es el núcleo entero del núcleo entero.
    """
    orthogonal = integer_kernel(rows, cols)
    return hermite_normal_form(integer_kernel(orthogonal, cols))
