"""Randomized property suites, each at 1,000+ cases with a fixed seed."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import zip_longest

import pytest

from cesno.builtins import shared_builtins
from cesno.callables import Argument, BindError, Parameter, Signature, bind_arguments
from cesno.lexer import scan_number
from cesno.types import (
    ClassInfo,
    LiteralType,
    NominalType,
    NULL,
    UNDEFINED,
    UnionType,
    is_assignable,
    normalize_union,
    types_equal,
)
from conftest import run_program

B = shared_builtins()
INT = B.t("int")
STRING = B.t("string")
FLOAT = B.t("float")
BOOL = B.t("bool")


class TestUnionAlgebra:
    def _pool(self, rng: random.Random):
        base = [INT, STRING, FLOAT, BOOL, NULL, UNDEFINED, LiteralType(STRING, "off"), LiteralType(BOOL, True), LiteralType(BOOL, False)]
        pool = list(base)
        for _ in range(4):
            pool.append(normalize_union(rng.sample(base, rng.randint(2, 4))))
        return pool

    def test_idempotent_commutative_associative(self):
        rng = random.Random(1001)
        for _ in range(1000):
            pool = self._pool(rng)
            items = [rng.choice(pool) for _ in range(rng.randint(1, 5))]
            u = normalize_union(items)
            # idempotence: feeding the result back in changes nothing
            assert types_equal(normalize_union([u, *items]), u)
            # commutativity: order never matters
            shuffled = items[:]
            rng.shuffle(shuffled)
            assert types_equal(normalize_union(shuffled), u)
            # associativity: grouping never matters
            if len(items) >= 2:
                cut = rng.randint(1, len(items) - 1)
                grouped = normalize_union([normalize_union(items[:cut]), *items[cut:]])
                assert types_equal(grouped, u)


class TestAssignabilityProperties:
    def _hierarchy(self, rng: random.Random):
        a0 = ClassInfo(f"A0_{rng.randint(0, 9999)}")
        a1 = ClassInfo("A1")
        a1.superclass = NominalType(a0)
        a2 = ClassInfo("A2")
        a2.superclass = NominalType(a1)
        return [NominalType(a2), NominalType(a1), NominalType(a0)]

    def test_reflexive_and_transitive(self):
        rng = random.Random(1002)
        for _ in range(1000):
            chain = self._hierarchy(rng)
            pool = chain + [INT, STRING, normalize_union([INT, STRING]), LiteralType(STRING, "x")]
            for t in pool:
                assert is_assignable(t, t), t.display()
            x, y, z = (rng.choice(pool) for _ in range(3))
            if is_assignable(x, y) and is_assignable(y, z):
                assert is_assignable(x, z), (x.display(), y.display(), z.display())
            # every subclass flows to every ancestor
            assert is_assignable(chain[0], chain[1])
            assert is_assignable(chain[0], chain[2])
            assert is_assignable(chain[1], chain[2])
            assert not is_assignable(chain[2], chain[0])


def _oracle_splits(params: list[Parameter], args: list[object]) -> list[list[int]]:
    """Brute force: every composition of len(args) into per-parameter counts.

    Counts: non-variadic non-optional take exactly 1, optional 0 or 1,
    variadic any k >= 0; every assigned argument must be type-compatible.
    """
    n = len(args)
    results: list[list[int]] = []

    def compositions(i: int, remaining: int, acc: list[int]):
        if i == len(params):
            if remaining == 0:
                results.append(acc[:])
            return
        p = params[i]
        if p.variadic:
            choices = range(remaining + 1)
        elif p.optional or p.has_default:
            choices = (0, 1)
        else:
            choices = (1,)
        for k in choices:
            if k > remaining:
                continue
            acc.append(k)
            compositions(i + 1, remaining - k, acc)
            acc.pop()

    compositions(0, n, [])
    valid = []
    for counts in results:
        idx = 0
        ok = True
        for p, k in zip(params, counts):
            for _ in range(k):
                if not is_assignable(args[idx].type, p.type):
                    ok = False
                    break
                idx += 1
            if not ok:
                break
        if ok:
            valid.append(counts)
    return valid


class TestBindingUniqueness:
    def test_bind_matches_brute_force(self):
        rng = random.Random(1003)
        universe = [INT, STRING, FLOAT]
        checked = 0
        ambiguous_seen = 0
        while checked < 1000:
            n_params = rng.randint(1, 4)
            params = []
            for i in range(n_params):
                t = rng.choice(universe)
                roll = rng.random()
                params.append(
                    Parameter(
                        f"p{i}",
                        t,
                        variadic=roll < 0.35,
                        optional=0.35 <= roll < 0.55,
                    )
                )
            sig = Signature(tuple(params))
            args = [Argument(None, rng.choice(universe)) for _ in range(rng.randint(0, 6))]
            oracle = _oracle_splits(params, args)
            try:
                binding = bind_arguments(sig, args)
            except BindError as exc:
                if exc.code == "E_AMBIGUOUS_VARIADIC_SPLIT":
                    assert len(oracle) > 1, (sig.display(), [a.type.display() for a in args])
                    ambiguous_seen += 1
                else:
                    assert len(oracle) == 0, (sig.display(), [a.type.display() for a in args], exc.code)
            else:
                assert len(oracle) == 1, (sig.display(), [a.type.display() for a in args], oracle)
                counts = oracle[0]
                idx = 0
                for p, k in zip(params, counts):
                    slot = binding.slots[p.name]
                    got = slot if isinstance(slot, list) else ([] if not isinstance(slot, Argument) else [slot])
                    assert len(got) == k
                    for item in got:
                        assert item is args[idx]
                        idx += 1
            checked += 1
        assert ambiguous_seen > 0  # the fuzz actually exercised ambiguity


class TestLoopZipLaw:
    def _run_case(self, lengths: list[int]) -> list[tuple]:
        arrays = []
        counter = 0
        for n in lengths:
            arrays.append([counter + i for i in range(n)])
            counter += 10 * (n + 1)
        names = [chr(ord("a") + i) for i in range(len(lengths))]
        indicators = ", ".join(f"let {name} in {arr}" for name, arr in zip(names, arrays))
        record = " + \"|\" + ".join(f"`${{{name}}}`" for name in names)
        src = (
            f"for ({indicators})\n"
            "{\n"
            f"    print({record})\n"
            "}\n"
        )
        r = run_program(src)
        assert r.ok, (r.error, src)
        return [tuple(line.split("|")) for line in r.stdout.splitlines()]

    def _oracle(self, lengths: list[int]) -> list[tuple]:
        arrays = []
        counter = 0
        for n in lengths:
            arrays.append([str(counter + i) for i in range(n)])
            counter += 10 * (n + 1)
        if not arrays or max(lengths, default=0) == 0:
            return []
        return [tuple(row) for row in zip_longest(*arrays, fillvalue="undefined")]

    def test_zip_with_undefined_law(self):
        cases = []
        for k in (1, 2, 3, 4):
            if k == 1:
                cases.extend([[a] for a in range(5)])
            elif k == 2:
                cases.extend([[a, b] for a in range(5) for b in range(5)])
            elif k == 3:
                cases.extend([[a, b, c] for a in range(5) for b in range(5) for c in range(5)])
            else:
                rng = random.Random(1004)
                while len(cases) < 1000:
                    cases.append([rng.randint(0, 4) for _ in range(rng.randint(1, 4))])
        assert len(cases) >= 1000
        for lengths in cases:
            rows = self._run_case(lengths)
            expected = self._oracle(lengths)
            assert rows == expected, lengths
            # body executes exactly max(Li) times
            assert len(rows) == max(lengths, default=0)


class TestDestructorExactness:
    TRACKER = (
        "let trace = []\n"
        "class Tracked\n"
        "{\n"
        "    public string tag\n"
        "    public constructor(string tag) { self.tag = tag ; trace.push(\"c:\" + tag) }\n"
        "    destructor() { trace.push(\"d:\" + self.tag) }\n"
        "}\n"
    )

    def _gen_block(self, rng: random.Random, depth: int, path: str, in_loop: bool) -> list[str]:
        lines: list[str] = []
        n_decls = rng.randint(0, 3)
        for i in range(n_decls):
            tag = f"{path}.{i}"
            lines.append(f'let v{i}_{path.replace(".", "_")} = Tracked("{tag}")')
        if depth < 3 and rng.random() < 0.6:
            inner = self._gen_block(rng, depth + 1, f"{path}x", in_loop)
            lines.append("{")
            lines.extend("    " + l for l in inner)
            lines.append("}")
        roll = rng.random()
        if roll < 0.15 and in_loop:
            lines.append("break")
        elif roll < 0.25 and in_loop:
            lines.append("continue")
        elif roll < 0.35:
            lines.append("return 0")
        elif roll < 0.45:
            lines.append("let boom = 1 / 0")
        return lines

    def test_exactly_once_reverse_order(self):
        rng = random.Random(1005)
        for case in range(1000):
            body = self._gen_block(rng, 0, f"s{case}", in_loop=True)
            src = self.TRACKER + (
                "function run()\n"
                "{\n"
                "    for (let pass_n in [1, 2])\n"
                "    {\n"
                + "\n".join("        " + l for l in body)
                + "\n    }\n"
                "    return 0\n"
                "}\n"
                'try { run() } catch (DivisionByZeroError e) { trace.push("caught") }\n'
                "for (let t in trace) { print(t) }\n"
            )
            r = run_program(src)
            assert r.ok, (r.error, src)
            events = r.stdout.splitlines()
            constructed: dict[str, int] = {}
            destroyed: dict[str, int] = {}
            order: list[tuple[str, str]] = []
            for e in events:
                if e.startswith("c:"):
                    constructed[e[2:]] = constructed.get(e[2:], 0) + 1
                    order.append(("c", e[2:]))
                elif e.startswith("d:"):
                    destroyed[e[2:]] = destroyed.get(e[2:], 0) + 1
                    order.append(("d", e[2:]))
            # every constructed instance is destroyed exactly once
            for tag, n in constructed.items():
                assert destroyed.get(tag, 0) == n, (tag, src)
            for tag, n in destroyed.items():
                assert constructed.get(tag, 0) == n, (tag, src)
            # within one scope instance-creation run, destruction is LIFO:
            # find consecutive constructions in the same scope and iteration
            live: list[str] = []
            for kind, tag in order:
                if kind == "c":
                    live.append(tag)
                else:
                    # the destroyed tag must be the most recent live one
                    # from its own scope prefix
                    scope_prefix = tag.rsplit(".", 1)[0]
                    candidates = [t for t in live if t.rsplit(".", 1)[0] == scope_prefix]
                    assert candidates and candidates[-1] == tag, (tag, events, src)
                    live.remove(tag)


class TestNumberLiteralOracle:
    def test_positional_expansion(self):
        rng = random.Random(1006)
        digit_sets = {2: "01", 8: "01234567", 10: "0123456789", 16: "0123456789abcdef"}
        prefixes = {2: "0b", 8: "0o", 10: "", 16: "0x"}
        max_int_digits = {2: 30, 8: 10, 10: 9, 16: 7}
        for _ in range(1000):
            radix = rng.choice([2, 8, 10, 16])
            int_digits = "".join(rng.choice(digit_sets[radix]) for _ in range(rng.randint(1, max_int_digits[radix])))
            frac = ""
            if radix in (10, 16) and rng.random() < 0.5:
                frac = "".join(rng.choice(digit_sets[radix]) for _ in range(rng.randint(1, 8)))
            text = prefixes[radix] + int_digits + ("." + frac if frac else "")
            lit = scan_number(text)
            oracle = Fraction(0)
            for i, d in enumerate(reversed(int_digits)):
                oracle += int(d, radix) * Fraction(radix) ** i
            for i, d in enumerate(frac):
                oracle += int(d, radix) * Fraction(radix) ** (-(i + 1))
            if frac:
                assert lit.value == float(oracle), text
            else:
                assert lit.value == int(oracle), text
