"""Frequency-domain modified nodal analysis over parsed netlists.

Unknowns are the non-ground node voltages, one branch current per
inductor (so mutual coupling stamps as a plain off-diagonal jwM term)
and one branch current per port source.  The system matrix separates
into frequency-independent pieces,

    A(w) = A0 + jw*A1 + w*A2,

with A0 holding resistors, incidences and port references, A1 the
reactive (L, C, M) terms and A2 the w-proportional loss terms from the
r = wL/Q (and wC/Q) model, so a full sweep is one batched dense solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .netlist import Coupling, Element, Netlist, Port
from .response import FrequencyResponse


class MnaError(ValueError):
    pass


@dataclass(frozen=True)
class StampedSystem:
    """Assembled MNA matrices and index maps for a netlist."""

    node_index: dict  # node name -> row (ground excluded)
    branch_index: dict  # inductor name / "P<idx>" -> row
    ports: tuple  # Port declarations, ascending index
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    @property
    def size(self) -> int:
        return self.a0.shape[0]

    def matrix(self, w):
        """A(w) for scalar w or an array (stacked along the lead axis)."""
        w = np.asarray(w, dtype=float)
        shape = w.shape + self.a0.shape
        w = w.reshape(w.shape + (1, 1))
        return self.a0 + 1j * w * self.a1 + w * self.a2


@dataclass(frozen=True)
class AcSolution:
    """Node voltages and branch currents over a frequency grid."""

    frequencies: np.ndarray
    node_voltages: dict  # node name -> complex array over frequency
    branch_currents: dict  # inductor name / "P<idx>" -> complex array

    def voltage(self, node: str):
        if node == "0":
            return np.zeros_like(self.frequencies, dtype=complex)
        return self.node_voltages[node]


def _check_connectivity(net: Netlist) -> None:
    adj: dict[str, set[str]] = {n: set() for n in net.nodes()}
    for s in net.statements:
        if isinstance(s, (Element, Port)):
            a, b = s.nodes
            adj[a].add(b)
            adj[b].add(a)
    if "0" not in adj:
        raise MnaError("missing ground node 0")
    seen = {"0"}
    stack = ["0"]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    floating = sorted(set(adj) - seen)
    if floating:
        raise MnaError(f"floating node or shorted loop: nodes {floating}")


def _check_coupling_groups(net: Netlist) -> None:
    """Every connected group of coupled inductors must have a PSD
    inductance matrix; otherwise the network could generate power."""
    inductors = {e.name.lower(): e for e in net.elements if e.kind == "L"}
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pairs = []
    for c in net.couplings:
        a, b = c.l1.lower(), c.l2.lower()
        pairs.append((a, b, c))
        parent[find(a)] = find(b)
    groups: dict[str, list[str]] = {}
    for name in {n for a, b, _ in pairs for n in (a, b)}:
        groups.setdefault(find(name), []).append(name)
    for members in groups.values():
        members = sorted(set(members))
        idx = {n: i for i, n in enumerate(members)}
        lmat = np.diag([inductors[n].value for n in members])
        for a, b, c in pairs:
            if a in idx and b in idx:
                m = c.k * math.sqrt(inductors[a].value * inductors[b].value)
                lmat[idx[a], idx[b]] += m
                lmat[idx[b], idx[a]] += m
        eig = np.linalg.eigvalsh(lmat)
        if eig.min() < -1e-12 * lmat.trace():
            raise MnaError(
                f"unrealizable coupling set over inductors {members}"
            )


def stamp(net: Netlist) -> StampedSystem:
    """Assemble the frequency-separated MNA matrices for a netlist."""
    _check_connectivity(net)
    _check_coupling_groups(net)
    nodes = [n for n in net.nodes() if n != "0"]
    node_index = {n: i for i, n in enumerate(nodes)}
    branch_index: dict[str, int] = {}
    row = len(nodes)
    inductors: dict[str, Element] = {}
    for e in net.elements:
        if e.kind == "L":
            branch_index[e.name] = row
            inductors[e.name.lower()] = e
            row += 1
    ports = net.ports
    for p in ports:
        branch_index[f"P{p.index}"] = row
        row += 1
    n = row
    a0 = np.zeros((n, n))
    a1 = np.zeros((n, n))
    a2 = np.zeros((n, n))

    def kcl(mat, nodes_pair, col, sign=1.0):
        a, b = nodes_pair
        if a != "0":
            mat[node_index[a], col] += sign
        if b != "0":
            mat[node_index[b], col] -= sign

    def shunt(mat, nodes_pair, y):
        a, b = nodes_pair
        ia = node_index.get(a)
        ib = node_index.get(b)
        if ia is not None:
            mat[ia, ia] += y
        if ib is not None:
            mat[ib, ib] += y
        if ia is not None and ib is not None:
            mat[ia, ib] -= y
            mat[ib, ia] -= y

    for e in net.elements:
        if e.kind == "R":
            shunt(a0, e.nodes, 1.0 / e.value)
        elif e.kind == "C":
            shunt(a1, e.nodes, e.value)
            if e.q is not None:
                shunt(a2, e.nodes, e.value / e.q)
        elif e.kind == "L":
            k = branch_index[e.name]
            kcl(a0, e.nodes, k)
            # branch equation: v_a - v_b - (jwL + wL/Q) i = 0
            a, b = e.nodes
            if a != "0":
                a0[k, node_index[a]] += 1.0
            if b != "0":
                a0[k, node_index[b]] -= 1.0
            a1[k, k] -= e.value
            if e.q is not None:
                a2[k, k] -= e.value / e.q
    for c in net.couplings:
        la = inductors[c.l1.lower()]
        lb = inductors[c.l2.lower()]
        m = c.k * math.sqrt(la.value * lb.value)
        ka = branch_index[la.name]
        kb = branch_index[lb.name]
        a1[ka, kb] -= m
        a1[kb, ka] -= m
    for p in ports:
        k = branch_index[f"P{p.index}"]
        kcl(a0, p.nodes, k)
        # branch equation: v_a - v_b - R i = Vs
        a, b = p.nodes
        if a != "0":
            a0[k, node_index[a]] += 1.0
        if b != "0":
            a0[k, node_index[b]] -= 1.0
        a0[k, k] -= p.ref
    return StampedSystem(node_index, branch_index, tuple(ports), a0, a1, a2)


def _solve(sys_: StampedSystem, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Batched dense solve of A(w) x = b with a residual check.

    b has shape (n,) or (n, m); the result gains a leading frequency axis.
    """
    a = sys_.matrix(w)
    bb = b.astype(complex)
    if bb.ndim == 1:
        bb = bb[:, None]
    try:
        x = np.linalg.solve(a, np.broadcast_to(bb, a.shape[:-2] + bb.shape))
    except np.linalg.LinAlgError as exc:
        raise MnaError(
            f"floating node or shorted loop: singular system over nodes "
            f"{sorted(sys_.node_index)}"
        ) from exc
    resid = np.linalg.norm(a @ x - bb, axis=(-2, -1))
    scale = np.linalg.norm(bb)
    if scale > 0 and np.any(resid / scale > 1e-10):
        raise MnaError("solver residual exceeds 1e-10")
    return x if b.ndim > 1 else x[..., 0]


def solve_ac(net: Netlist, frequencies=None, excitation=None) -> AcSolution:
    """Node voltages and branch currents for a given port excitation.

    ``excitation`` maps port index to source voltage (Thevenin source
    behind the port reference impedance); default drives port 1 with 1 V.
    """
    sys_ = stamp(net)
    if frequencies is None:
        if net.ac is None:
            raise MnaError("no frequency grid: netlist has no .ac card")
        frequencies = net.ac.frequencies()
    f = np.asarray(frequencies, dtype=float)
    if excitation is None:
        excitation = {1: 1.0}
    b = np.zeros(sys_.size, dtype=complex)
    for idx, vs in excitation.items():
        key = f"P{idx}"
        if key not in sys_.branch_index:
            raise MnaError(f"no port {idx} in netlist")
        b[sys_.branch_index[key]] = vs
    x = _solve(sys_, 2.0 * math.pi * f, b)
    voltages = {n: x[..., i] for n, i in sys_.node_index.items()}
    currents = {n: x[..., i] for n, i in sys_.branch_index.items()}
    return AcSolution(f, voltages, currents)


def sparams(net: Netlist, frequencies=None) -> FrequencyResponse:
    """Full S-matrix by per-port incident-wave excitation.

    Driving port j with source voltage 2*sqrt(R_j) makes the incident
    wave a_j = 1, so the reflected waves read off the port voltages
    directly: S_ij = V_i/sqrt(R_i) - delta_ij.
    """
    sys_ = stamp(net)
    if not sys_.ports:
        raise MnaError("netlist declares no ports")
    if frequencies is None:
        if net.ac is None:
            raise MnaError("no frequency grid: netlist has no .ac card")
        frequencies = net.ac.frequencies()
    f = np.asarray(frequencies, dtype=float)
    nports = len(sys_.ports)
    b = np.zeros((sys_.size, nports), dtype=complex)
    for j, p in enumerate(sys_.ports):
        b[sys_.branch_index[f"P{p.index}"], j] = 2.0 * math.sqrt(p.ref)
    x = _solve(sys_, 2.0 * math.pi * f, b)
    s = np.empty((f.size, nports, nports), dtype=complex)
    for i, p in enumerate(sys_.ports):
        a_node, b_node = p.nodes
        va = x[:, sys_.node_index[a_node], :] if a_node != "0" else 0.0
        vb = x[:, sys_.node_index[b_node], :] if b_node != "0" else 0.0
        s[:, i, :] = (va - vb) / math.sqrt(p.ref)
        s[:, i, i] -= 1.0
    return FrequencyResponse(f, s, tuple(p.ref for p in sys_.ports))
