"""Regenerate the defining-system certificates shipped in src/mcmassey/certificates."""

from pathlib import Path

from mcmassey import massey as ms
from mcmassey.models import heisenberg, symplectic_class, witt_model
from mcmassey.textio import Certificate

OUT = Path(__file__).resolve().parent.parent / "src" / "mcmassey" / "certificates"


def searched(p, doc, exprs, description, budget=10_000):
    classes = [ms.ClassMatrix.scalar(p.class_of(e)) for e in exprs]
    res = ms.find_defining_system(p, classes, budget=budget)
    if res.system is None:
        raise SystemExit(f"search failed for {description}")
    val = ms.massey_value(p, classes, res.system)
    return Certificate(p, doc, classes, res.system, val.classical, "classical", description)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    certs = {}

    w = witt_model(4)
    w1, w2 = w.gens("w1", "w2")
    certs["witt4_quadruple"] = searched(
        w, "preset witt 4\n", [w2.scale(6), w1, w1, w1],
        "<6 w2, w1, w1, w1> contains [3 w1 w4] on witt(4)")
    certs["witt4_triple"] = searched(
        w, "preset witt 4\n", [-w1, w2, w2],
        "<-w1, w2, w2> contains [w2 w3] on witt(4)")

    h = heisenberg()
    a1, a2 = h.gens("a1", "a2")
    cert = searched(h, "preset heisenberg\n", [a1, a1, a2], "<a1, a1, a2> on the Heisenberg model")
    cert.claimed = -cert.claimed
    cert.convention = "generalized"
    certs["heisenberg_triple"] = cert

    for m in (2, 3):
        p, classes, system = ms.symplectic_defining_system(m)
        claimed = ms.ClassMatrix.scalar(p.class_of(symplectic_class(m, p)))
        certs[f"symplectic_m{m}"] = Certificate(
            p, f"preset witt {2 * m}\n", classes, system, claimed, "classical",
            f"{2 * m}-fold matrix product on witt({2 * m}) containing the symplectic class")

    for name, cert in sorted(certs.items()):
        rep = ms.verify_membership(cert.presentation, cert.claimed, cert.classes, cert.system, cert.convention)
        if not rep.ok:
            raise SystemExit(f"{name}: certificate does not verify: {rep.failures}")
        (OUT / f"{name}.json").write_text(cert.dumps(), encoding="utf-8")
        print(f"wrote {name}.json")


if __name__ == "__main__":
    main()
