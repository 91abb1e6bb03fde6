"""Explicit number field catalog: embeddings, discriminants, ideal lattices.

Fields are desk-scale (degrees 2-8), either totally real or totally complex,
with integral bases supplied as catalog data.  Embeddings are computed
numerically from the defining polynomial's roots (companion matrix plus
Newton polishing); exact algebraic arithmetic is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from . import lattice
from .lattice import COMPLEX, REAL, LatticeBasis


class CatalogError(ValueError):
    """Catalog parse or validation failure."""


@dataclass(frozen=True)
class IdealSpec:
    label: str
    z_basis: tuple[tuple[Fraction, ...], ...]
    norm: int
    class_label: str
    principal: bool


@dataclass(frozen=True)
class FieldSpec:
    name: str
    degree: int
    signature: tuple[int, int]
    min_poly: tuple[int, ...]          # ascending, constant term first, monic
    integral_basis: tuple[tuple[Fraction, ...], ...]
    disc_catalog: int
    ideals: tuple[IdealSpec, ...] = field(default=())

    @property
    def totally_real(self) -> bool:
        return self.signature[1] == 0

    @property
    def ambient_n(self) -> int:
        """Ambient dimension: degree if totally real, degree/2 if totally complex."""
        return self.degree if self.totally_real else self.degree // 2

    def unit_ideal(self) -> IdealSpec:
        return IdealSpec(label="unit", z_basis=self.integral_basis,
                         norm=1, class_label="principal", principal=True)


def _frac(tok: str) -> Fraction:
    return Fraction(tok.strip())


def _parse_vectors(text: str) -> tuple[tuple[Fraction, ...], ...]:
    vecs = []
    for chunk in text.split(";"):
        vecs.append(tuple(_frac(t) for t in chunk.split(",")))
    return tuple(vecs)


def _frac_det(mat) -> Fraction:
    """Exact determinant of a square matrix of Fractions by elimination."""
    m = [list(row) for row in mat]
    k = len(m)
    det = Fraction(1)
    for col in range(k):
        pivot = next((r for r in range(col, k) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = Fraction(1) / m[col][col]
        for r in range(col + 1, k):
            factor = m[r][col] * inv
            if factor:
                for c in range(col, k):
                    m[r][c] -= factor * m[col][c]
    return det


def _frac_solve(mat, rhs):
    """Solve mat.T-free linear system over Fractions: returns x with x @ mat = rhs."""
    k = len(mat)
    aug = [[mat[r][c] for r in range(k)] for c in range(k)]  # transpose
    x = [list(row) for row in aug]
    b = list(rhs)
    # forward elimination with partial (first nonzero) pivoting
    perm = list(range(k))
    for col in range(k):
        pivot = next((r for r in range(col, k) if x[r][col] != 0), None)
        if pivot is None:
            raise CatalogError("singular basis matrix")
        x[col], x[pivot] = x[pivot], x[col]
        b[col], b[pivot] = b[pivot], b[col]
        inv = Fraction(1) / x[col][col]
        for r in range(col + 1, k):
            f = x[r][col] * inv
            if f:
                for c in range(col, k):
                    x[r][c] -= f * x[col][c]
                b[r] -= f * b[col]
    sol = [Fraction(0)] * k
    for r in range(k - 1, -1, -1):
        acc = b[r]
        for c in range(r + 1, k):
            acc -= x[r][c] * sol[c]
        sol[r] = acc / x[r][r]
    return sol


def _validate_field(f: FieldSpec):
    r1, r2 = f.signature
    if r1 + 2 * r2 != f.degree:
        raise CatalogError(
            f"{f.name}: signature ({r1},{r2}) inconsistent with degree {f.degree}")
    if r1 > 0 and r2 > 0:
        raise CatalogError(
            f"{f.name}: mixed signature; only totally real or totally complex "
            f"fields are supported")
    if len(f.min_poly) != f.degree + 1 or f.min_poly[-1] != 1:
        raise CatalogError(f"{f.name}: min_poly must be monic of degree {f.degree}")
    if f.disc_catalog == 0:
        raise CatalogError(f"{f.name}: discriminant must be nonzero")
    if len(f.integral_basis) != f.degree or any(
            len(v) != f.degree for v in f.integral_basis):
        raise CatalogError(f"{f.name}: integral basis must be {f.degree} "
                           f"vectors of length {f.degree}")
    if _frac_det(f.integral_basis) == 0:
        raise CatalogError(f"{f.name}: integral basis is singular")
    roots = field_roots(f)
    # squarefree check: numerical root separation
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < 1e-8:
                raise CatalogError(f"{f.name}: min_poly has repeated roots")
    mismatch = discriminant_check(f)
    if mismatch > 1e-6:
        raise CatalogError(
            f"{f.name}: catalog discriminant mismatch {mismatch:.3e}")
    for ideal in f.ideals:
        _validate_ideal(f, ideal)


def _validate_ideal(f: FieldSpec, ideal: IdealSpec):
    if len(ideal.z_basis) != f.degree:
        raise CatalogError(f"{f.name}/{ideal.label}: z_basis must have "
                           f"{f.degree} vectors")
    # index [O_K : I] = |det| of z_basis expressed in the integral basis
    coords = [_frac_solve(f.integral_basis, v) for v in ideal.z_basis]
    for row in coords:
        for c in row:
            if c.denominator != 1:
                raise CatalogError(
                    f"{f.name}/{ideal.label}: z_basis element outside the "
                    f"ring of integers")
    index = abs(_frac_det(coords))
    if index != ideal.norm:
        raise CatalogError(
            f"{f.name}/{ideal.label}: index {index} does not equal norm "
            f"{ideal.norm}")


def parse_catalog(text: str) -> list[FieldSpec]:
    fields: list[FieldSpec] = []
    cur: dict | None = None
    cur_ideal: dict | None = None
    pending_ideals: list[IdealSpec] = []

    def finish_ideal():
        nonlocal cur_ideal
        if cur_ideal is None:
            return
        try:
            pending_ideals.append(IdealSpec(
                label=cur_ideal["name"],
                z_basis=_parse_vectors(cur_ideal["basis"]),
                norm=int(cur_ideal["norm"]),
                class_label=cur_ideal["class"],
                principal=cur_ideal["principal"].lower() in ("1", "true", "yes"),
            ))
        except KeyError as exc:
            raise CatalogError(
                f"line {cur_ideal['_line']}: ideal missing key {exc}") from None
        cur_ideal = None

    def finish_field():
        nonlocal cur
        finish_ideal()
        if cur is None:
            return
        try:
            spec = FieldSpec(
                name=cur["name"],
                degree=int(cur["degree"]),
                signature=(int(cur["r1"]), int(cur["r2"])),
                min_poly=tuple(int(t) for t in cur["minpoly"].split(",")),
                integral_basis=_parse_vectors(cur["basis"]),
                disc_catalog=int(cur["disc"]),
                ideals=tuple(pending_ideals),
            )
        except KeyError as exc:
            raise CatalogError(
                f"line {cur['_line']}: field missing key {exc}") from None
        _validate_field(spec)
        fields.append(spec)
        pending_ideals.clear()
        cur = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[field]":
            finish_field()
            cur = {"_line": lineno}
        elif line == "[ideal]":
            if cur is None:
                raise CatalogError(f"line {lineno}: [ideal] before any [field]")
            finish_ideal()
            cur_ideal = {"_line": lineno}
        elif "=" in line:
            key, _, value = line.partition("=")
            target = cur_ideal if cur_ideal is not None else cur
            if target is None:
                raise CatalogError(f"line {lineno}: key outside a section")
            target[key.strip()] = value.strip()
        else:
            raise CatalogError(f"line {lineno}: cannot parse {raw!r}")
    finish_field()
    return fields


def load_catalog(path=None) -> list[FieldSpec]:
    """Load and validate a field catalog; defaults to the packaged one."""
    if path is None:
        text = resources.files("latcode").joinpath("data/fields.cat").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return parse_catalog(text)


def catalog_field(name: str, path=None) -> FieldSpec:
    for f in load_catalog(path):
        if f.name == name:
            return f
    raise KeyError(f"field {name!r} not in catalog")


def field_roots(f: FieldSpec) -> np.ndarray:
    """Roots of the defining polynomial chosen and ordered for the embedding.

    Totally real fields: all roots, ascending.  Totally complex fields: one
    root per conjugate pair (positive imaginary part), ordered by ascending
    real part then imaginary part.
    """
    coeffs_desc = list(f.min_poly[::-1])
    roots = np.roots(coeffs_desc)
    # Newton polishing for a couple of digits beyond np.roots
    poly = np.polynomial.Polynomial(list(map(float, f.min_poly)))
    dpoly = poly.deriv()
    for _ in range(3):
        roots = roots - poly(roots) / dpoly(roots)
    if f.totally_real:
        if np.max(np.abs(roots.imag)) > 1e-8:
            raise CatalogError(f"{f.name}: expected all-real roots")
        return np.sort(roots.real)
    if np.min(np.abs(roots.imag)) < 1e-8:
        raise CatalogError(f"{f.name}: expected no real roots")
    chosen = roots[roots.imag > 0]
    if len(chosen) != f.degree // 2:
        raise CatalogError(f"{f.name}: could not split conjugate pairs")
    order = np.lexsort((chosen.imag, chosen.real))
    return chosen[order]


def all_roots(f: FieldSpec) -> np.ndarray:
    """All ``degree`` roots (both members of each conjugate pair if complex)."""
    r = field_roots(f)
    if f.totally_real:
        return r.astype(complex)
    return np.concatenate([r, np.conj(r)])


def embed_element(f: FieldSpec, coeffs) -> np.ndarray:
    """Canonical embedding of an element given by power-basis coordinates."""
    roots = field_roots(f)
    vals = np.zeros_like(roots, dtype=complex)
    for c in reversed([float(c) for c in coeffs]):
        vals = vals * roots + c
    if f.totally_real:
        return vals.real
    return vals


def element_norm(f: FieldSpec, coeffs) -> float:
    """|Nr(x)| as the product of the element's images under all embeddings."""
    roots = all_roots(f)
    vals = np.zeros_like(roots)
    for c in reversed([float(c) for c in coeffs]):
        vals = vals * roots + c
    return float(np.prod(np.abs(vals)))


def embedding_matrix(f: FieldSpec) -> LatticeBasis:
    """Lattice basis psi(w_1), ..., psi(w_m) of the embedded ring of integers."""
    rows = [embed_element(f, w) for w in f.integral_basis]
    ambient = REAL if f.totally_real else COMPLEX
    return LatticeBasis(ambient, np.array(rows))


def discriminant_check(f: FieldSpec) -> float:
    """Relative mismatch between the catalog discriminant and the one
    recovered from the embedded lattice volume."""
    vol = lattice.volume(embedding_matrix(f))
    if f.totally_real:
        recovered = vol * vol
    else:
        n = f.degree // 2
        recovered = (vol * 2.0 ** n) ** 2
    return abs(recovered - abs(f.disc_catalog)) / abs(f.disc_catalog)


def ideal_lattice(f: FieldSpec, ideal: IdealSpec) -> LatticeBasis:
    """Embedded ideal lattice; volume verified against N(I) * Vol(psi(O_K))."""
    rows = [embed_element(f, v) for v in ideal.z_basis]
    ambient = REAL if f.totally_real else COMPLEX
    basis = LatticeBasis(ambient, np.array(rows))
    vol = lattice.volume(basis)
    if f.totally_real:
        expected = ideal.norm * math.sqrt(abs(f.disc_catalog))
    else:
        expected = ideal.norm * 2.0 ** (-(f.degree // 2)) * math.sqrt(abs(f.disc_catalog))
    if abs(vol - expected) / expected > 1e-9:
        raise CatalogError(
            f"{f.name}/{ideal.label}: ideal volume {vol} != expected {expected}")
    return basis


def default_min_ideal_radius(f: FieldSpec, ideal: IdealSpec) -> float:
    """Pragmatic search radius for min_ideal; generally an upper-bound search."""
    m = f.degree
    return 3.0 * math.sqrt(m) * (ideal.norm * math.sqrt(abs(f.disc_catalog))) ** (1.0 / m)


def min_ideal(f: FieldSpec, ideal: IdealSpec,
              search_radius: float | None = None) -> float:
    """min over nonzero x in I with ||psi(x)|| <= radius of the normalized norm.

    Complex fields: sqrt(|Nr(x)| / N(I)); real fields: |Nr(x)| / N(I).  This
    is an upper bound on min(I), exact whenever the attaining element lies
    inside the search radius.
    """
    if search_radius is None:
        search_radius = default_min_ideal_radius(f, ideal)
    basis = ideal_lattice(f, ideal)
    best = math.inf
    # N(I) divides Nr(x) for x in an integral ideal, so the normalized value
    # is >= 1; enumerate in growing shells and stop once that floor is hit
    for r in (search_radius / 4.0, search_radius / 2.0, search_radius):
        coords, vecs = lattice.points_in_ball(basis, np.zeros(basis.n), r)
        for u, v in zip(coords, vecs):
            if not np.any(u):
                continue
            p = float(np.prod(np.abs(v)))
            # product over chosen embeddings: sqrt(|Nr|) complex, |Nr| real
            if f.totally_real:
                best = min(best, p / ideal.norm)
            else:
                best = min(best, p / math.sqrt(ideal.norm))
        if best <= 1.0 + 1e-9:
            break
    if math.isinf(best):
        raise ValueError(
            f"no nonzero ideal element within radius {search_radius}")
    return best
