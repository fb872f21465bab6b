"""Lattice geometry: periodic square lattices and matter chains.

Square-lattice sites are ``(x, y)`` with ``site = y * width + x`` and two
outgoing links per site, ``link = 2 * site + direction`` (0 along x,
1 along y).  Plaquettes are traversed counterclockwise from the lower
left corner, ``bottom, right, top, left``, where the product convention
is ``g_bottom g_right g_top^-1 g_left^-1``.  A star collects the four
links touching one site (two outgoing, two incoming).

Chain sites ``0 .. n-1`` sit on a ring; link ``n`` connects site ``n``
to ``n + 1 mod N``.  The wrap bond is the one through the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError, UnsupportedFeatureError

__all__ = ["Link", "Plaquette", "Star", "SquareLattice", "Bond", "ChainLattice"]


@dataclass(frozen=True)
class Link:
    index: int
    site: tuple[int, int]
    direction: int


@dataclass(frozen=True)
class Plaquette:
    site: tuple[int, int]
    bottom: int
    right: int
    top: int
    left: int

    @property
    def links(self) -> tuple[int, int, int, int]:
        return (self.bottom, self.right, self.top, self.left)


@dataclass(frozen=True)
class Star:
    site: tuple[int, int]
    out_x: int
    out_y: int
    in_x: int
    in_y: int

    @property
    def links(self) -> tuple[int, int, int, int]:
        return (self.out_x, self.out_y, self.in_x, self.in_y)


class SquareLattice:
    """Periodic square lattice of gauge links."""

    def __init__(self, width: int, height: int, periodic: bool = True) -> None:
        if not periodic:
            raise UnsupportedFeatureError("only periodic square lattices are supported")
        if width < 2 or height < 2:
            raise InvalidParameterError(
                "plaquette and star constructions need width, height >= 2"
            )
        self.width = width
        self.height = height
        self.n_sites = width * height
        self.n_links = 2 * self.n_sites

    def site_index(self, x: int, y: int) -> int:
        return (y % self.height) * self.width + (x % self.width)

    def link_index(self, x: int, y: int, direction: int) -> int:
        if direction not in (0, 1):
            raise InvalidParameterError(f"direction must be 0 or 1, got {direction}")
        return 2 * self.site_index(x, y) + direction

    @property
    def links(self) -> list[Link]:
        out = []
        for y in range(self.height):
            for x in range(self.width):
                for direction in (0, 1):
                    out.append(Link(self.link_index(x, y, direction), (x, y), direction))
        return out

    def plaquettes(self) -> list[Plaquette]:
        out = []
        for y in range(self.height):
            for x in range(self.width):
                out.append(
                    Plaquette(
                        site=(x, y),
                        bottom=self.link_index(x, y, 0),
                        right=self.link_index(x + 1, y, 1),
                        top=self.link_index(x, y + 1, 0),
                        left=self.link_index(x, y, 1),
                    )
                )
        return out

    def stars(self) -> list[Star]:
        out = []
        for y in range(self.height):
            for x in range(self.width):
                out.append(
                    Star(
                        site=(x, y),
                        out_x=self.link_index(x, y, 0),
                        out_y=self.link_index(x, y, 1),
                        in_x=self.link_index(x - 1, y, 0),
                        in_y=self.link_index(x, y - 1, 1),
                    )
                )
        return out


@dataclass(frozen=True)
class Bond:
    link: int
    left_site: int
    right_site: int
    wrap: bool


class ChainLattice:
    """Periodic chain with one link per bond and staggered matter sites."""

    def __init__(self, n_sites: int) -> None:
        if n_sites < 2 or n_sites % 2 != 0:
            raise InvalidParameterError(
                f"staggered chain needs an even number of sites >= 2, got {n_sites}"
            )
        self.n_sites = n_sites
        self.n_links = n_sites

    def bonds(self) -> list[Bond]:
        n = self.n_sites
        return [Bond(i, i, (i + 1) % n, wrap=(i == n - 1)) for i in range(n)]

    def even_bonds(self) -> list[Bond]:
        return [b for b in self.bonds() if b.link % 2 == 0]

    def odd_bonds(self) -> list[Bond]:
        return [b for b in self.bonds() if b.link % 2 == 1]
