import pytest

DUMP_XML = """<mediawiki xmlns="http://www.mediawiki.org/xml/export-0.11/" xml:lang="lmo">
  <siteinfo><sitename>Wikipedia</sitename></siteinfo>
  <page>
    <title>Milan</title>
    <ns>0</ns>
    <id>1</id>
    <revision><id>10</id><text xml:space="preserve">{{GrafMIL}}
'''Milan''' l'è 'na citaa de la [[Lombardia]], in del nord de l'Italia.
== Storia ==
La citaa l'è stada fondada di Insubri tanti secoi fa.
La citaa l'è stada fondada di Insubri tanti secoi fa.
1901
[[Categoria:Citaa]]</text></revision>
  </page>
  <page>
    <title>Bergum</title>
    <ns>0</ns>
    <id>2</id>
    <revision><id>11</id><text xml:space="preserve">Bergum l'è 'na cità lombarda visina a Milan, sensa tag.
Ona seconda riga sensa nissun tag de ortografia.</text></revision>
  </page>
  <page>
    <title>Milano</title>
    <ns>0</ns>
    <id>3</id>
    <redirect title="Milan" />
    <revision><id>12</id><text xml:space="preserve">#REDIRECT [[Milan]]</text></revision>
  </page>
  <page>
    <title>Template:GrafMIL</title>
    <ns>10</ns>
    <id>4</id>
    <revision><id>13</id><text xml:space="preserve">Quest l'è un modell cun tanti paroll denter.</text></revision>
  </page>
</mediawiki>
"""


@pytest.fixture
def dump_bytes():
    return DUMP_XML.encode("utf-8")


_ACCEPTANCE: dict[int, tuple] = {}


def record_acceptance(criterion, ok, detail):
    """Remember the outcome of one acceptance criterion (ok=None means skipped)."""
    if criterion in _ACCEPTANCE and _ACCEPTANCE[criterion][0] is False:
        return
    _ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {detail}")
