"""JSON spec documents: parsing into process specs and serializing back.

Kernels in files are row-per-source, ``kernels[t][from][to] = p_t(to | from)``
(the transpose of the internal layout); the loader transposes. A kernel may
also be written as ``{from_label: {to_label: p}}``. A list item
``{"kernel": K, "repeat": m}`` (``"potential"`` for potentials) expands to
``m`` copies.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import numpy as np

from .chain import ChainSpec
from .core import Alphabet, SpecError, StochasticityError, as_probvec, check_kernel
from .mmp import MmpSpec
from .process import ProcessSpec, type_tag
from .tree import TreeSpec, TreeTopology, canonical_renumbering
from .undirected import UndirectedChainSpec

FORMAT_VERSION = "1"
SPEC_TYPES = ("chain", "undirected_chain", "tree", "mmp")


def _require(doc: dict, key: str, where: str = "spec"):
    if key not in doc:
        raise SpecError(f"{where}: missing required field {key!r}")
    return doc[key]


def _alphabet(raw, name: str) -> Alphabet:
    if not isinstance(raw, list) or not all(isinstance(s, (str, int)) for s in raw):
        raise SpecError(f"{name}: expected a list of string or integer labels")
    return Alphabet(raw)


def _vector(raw, alphabet: Alphabet, name: str) -> np.ndarray:
    if isinstance(raw, dict):
        out = np.zeros(alphabet.size)
        for label, p in raw.items():
            out[alphabet.index(_label(label, alphabet))] = _number(p, name)
        return out
    if not isinstance(raw, list) or len(raw) != alphabet.size:
        raise SpecError(f"{name}: expected {alphabet.size} entries")
    return np.array([_number(p, name) for p in raw])


def _number(x, name: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise SpecError(f"{name}: expected a number, got {x!r}")
    return float(x)


def _label(raw, alphabet: Alphabet):
    # JSON object keys are strings; map them back onto integer labels
    if raw in alphabet.symbols:
        return raw
    for s in alphabet.symbols:
        if str(s) == raw:
            return s
    raise SpecError(f"unknown symbol {raw!r}; alphabet is {list(alphabet.symbols)}")


def _row_matrix(raw, alphabet: Alphabet, name: str) -> np.ndarray:
    """Matrix in file layout ``M[from][to]``, as a float array."""
    k = alphabet.size
    if isinstance(raw, dict):
        M = np.zeros((k, k))
        for a, row in raw.items():
            if not isinstance(row, dict):
                raise SpecError(f"{name}: row {a!r} must be an object")
            for b, p in row.items():
                M[alphabet.index(_label(a, alphabet)), alphabet.index(_label(b, alphabet))] = \
                    _number(p, name)
        return M
    if (not isinstance(raw, list) or len(raw) != k
            or not all(isinstance(r, list) and len(r) == k for r in raw)):
        raise SpecError(f"{name}: expected a {k}x{k} matrix")
    return np.array([[_number(p, name) for p in r] for r in raw])


def _kernel(raw, alphabet: Alphabet, name: str) -> np.ndarray:
    return check_kernel(_row_matrix(raw, alphabet, name).T, name=name, labels=alphabet.symbols)


def _expand(items, key: str, name: str, parse) -> list:
    if not isinstance(items, list):
        raise SpecError(f"{name}: expected a list")
    out = []
    for t, item in enumerate(items):
        if isinstance(item, dict) and key in item:
            m = item.get("repeat", 1)
            if isinstance(m, bool) or not isinstance(m, int) or m < 0:
                raise SpecError(f"{name}[{t}]: repeat must be a nonnegative integer")
            out.extend([parse(item[key], f"{name}[{t}]")] * m)
        else:
            out.append(parse(item, f"{name}[{t}]"))
    return out


def _check_n(doc: dict, n: int) -> None:
    if "n" in doc and doc["n"] != n:
        raise SpecError(f"spec: n = {doc['n']!r} but the kernels/potentials imply n = {n}")


def parse_spec(doc: Any) -> tuple[ProcessSpec, dict[int, int] | None]:
    """Build a process spec from a parsed JSON document.

    Returns ``(spec, renumbering)``; ``renumbering`` maps input node labels to
    breadth-first labels for trees that needed it, else None.
    """
    if not isinstance(doc, dict):
        raise SpecError("spec: top level must be a JSON object")
    version = doc.get("format_version", FORMAT_VERSION)
    if str(version) != FORMAT_VERSION:
        raise SpecError(f"spec: unsupported format_version {version!r}")
    kind = _require(doc, "type")
    if kind not in SPEC_TYPES:
        raise SpecError(f"spec: unknown type {kind!r}; expected one of {SPEC_TYPES}")

    if kind == "chain":
        A = _alphabet(_require(doc, "alphabet"), "alphabet")
        p0 = as_probvec(_vector(_require(doc, "p0"), A, "p0"), name="p0")
        kernels = _expand(_require(doc, "kernels"), "kernel", "kernels",
                          lambda raw, nm: _kernel(raw, A, nm))
        _check_n(doc, len(kernels) + 1)
        return ChainSpec(A, p0, tuple(kernels)), None

    if kind == "undirected_chain":
        A = _alphabet(_require(doc, "alphabet"), "alphabet")
        pots = _expand(_require(doc, "potentials"), "potential", "potentials",
                       lambda raw, nm: _row_matrix(raw, A, nm))
        _check_n(doc, len(pots) + 1)
        return UndirectedChainSpec(A, len(pots) + 1, tuple(pots)), None

    if kind == "tree":
        A = _alphabet(_require(doc, "alphabet"), "alphabet")
        p0 = as_probvec(_vector(_require(doc, "p0"), A, "p0"), name="p0")
        named = _require(doc, "kernels")
        if not isinstance(named, dict):
            raise SpecError("kernels: expected an object mapping names to kernels")
        mats = {name: _kernel(raw, A, f"kernels[{name!r}]") for name, raw in named.items()}
        raw_edges = _require(doc, "edges")
        if not isinstance(raw_edges, list):
            raise SpecError("edges: expected a list of [parent, child, kernel_name]")
        edges, refs = [], {}
        for t, e in enumerate(raw_edges):
            if (not isinstance(e, list) or len(e) != 3 or not all(isinstance(x, int) for x in e[:2])
                    or e[2] not in mats):
                raise SpecError(f"edges[{t}]: expected [parent, child, kernel_name] "
                                f"with a known kernel name")
            edges.append((e[0], e[1]))
            refs[(e[0], e[1])] = mats[e[2]]
        n = doc.get("n", len(edges) + 1)
        if n != len(edges) + 1:
            raise SpecError(f"tree: n = {n!r} but {len(edges)} edges given")
        new_edges, mapping = canonical_renumbering(n, edges)
        identity = all(k == v for k, v in mapping.items())
        kernels = {(mapping[u], mapping[v]): K for (u, v), K in refs.items()}
        spec = TreeSpec(TreeTopology(n, new_edges), A, p0, kernels)
        return spec, (None if identity else mapping)

    O = _alphabet(_require(doc, "obs_alphabet"), "obs_alphabet")
    H = _alphabet(_require(doc, "hid_alphabet"), "hid_alphabet")
    ko, kh = O.size, H.size

    def pair_array(raw, name, depth):
        arr = np.asarray(raw, dtype=object)
        want = (ko, kh) * depth
        if arr.shape != want:
            raise SpecError(f"{name}: expected nested shape {want} indexed by "
                            f"[obs][hid]{'[obs][hid]' if depth == 2 else ''}")
        return np.vectorize(lambda x: _number(x, name), otypes=[float])(arr)

    p0 = as_probvec(pair_array(_require(doc, "p0"), "p0", 1).reshape(-1), name="p0")
    labels = [(o, h) for o in O.symbols for h in H.symbols]

    def mmp_kernel(raw, name):
        M = pair_array(raw, name, 2).reshape(ko * kh, ko * kh)
        return check_kernel(M.T, name=name, labels=labels)

    kernels = _expand(_require(doc, "kernels"), "kernel", "kernels", mmp_kernel)
    _check_n(doc, len(kernels) + 1)
    return MmpSpec(O, H, p0, tuple(kernels)), None


def load_spec(path: str | Path) -> tuple[ProcessSpec, dict[int, int] | None, str]:
    """Read and parse a spec file; also returns the SHA-256 of its bytes."""
    data = Path(path).read_bytes()
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SpecError(f"spec: not valid UTF-8 JSON ({exc})") from None
    spec, renum = parse_spec(doc)
    return spec, renum, hashlib.sha256(data).hexdigest()


def _labels(A: Alphabet) -> list:
    return list(A.symbols)


def spec_to_document(spec: ProcessSpec) -> dict:
    """Inverse of :func:`parse_spec` (explicit matrices, no repeat shorthand)."""
    tag = type_tag(spec)
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION, "type": tag}
    if isinstance(spec, ChainSpec):
        doc.update(alphabet=_labels(spec.alphabet), n=spec.n, p0=spec.p0.tolist(),
                   kernels=[K.T.tolist() for K in spec.kernels])
    elif isinstance(spec, UndirectedChainSpec):
        doc.update(alphabet=_labels(spec.alphabet), n=spec.n,
                   potentials=[P.tolist() for P in spec.potentials])
    elif isinstance(spec, TreeSpec):
        names = {e: f"e{u}_{v}" for e in spec.topology.edges for u, v in [e]}
        doc.update(alphabet=_labels(spec.alphabet), n=spec.n, p0=spec.p0.tolist(),
                   kernels={names[e]: spec.edge_kernels[e].T.tolist() for e in spec.topology.edges},
                   edges=[[u, v, names[(u, v)]] for u, v in spec.topology.edges])
    else:
        ko, kh = spec.obs_alphabet.size, spec.hid_alphabet.size
        doc.update(obs_alphabet=_labels(spec.obs_alphabet), hid_alphabet=_labels(spec.hid_alphabet),
                   n=spec.n, p0=spec.p0.reshape(ko, kh).tolist(),
                   kernels=[K.T.reshape(ko, kh, ko, kh).tolist() for K in spec.kernels])
    return doc


__all__ = ["FORMAT_VERSION", "SPEC_TYPES", "StochasticityError", "load_spec", "parse_spec",
           "spec_to_document"]
