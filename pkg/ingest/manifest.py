# ingest/manifest.py
"""
Intent extraction from apktool-decoded AndroidManifest.xml documents.

Counts one occurrence per <action>/<category> child of any <intent-filter>,
plus one Extra occurrence per attribute value anywhere in the document that
looks like ``*.intent.extra.*``.
"""

import re
from collections import Counter
from typing import Iterator, Optional, Tuple, Union

from lxml import etree

from config import ANDROID_NS
from errors import EmptyName, MalformedXml, MissingManifestRoot
from .corpus import AppSample, Label
from .intents import IntentKey, IntentKind

FILTER_TAG = "intent-filter"
FILTER_CHILD_KINDS = {
    "action": IntentKind.ACTION,
    "category": IntentKind.CATEGORY,
}

EXTRA_PATTERN = re.compile(r"^[^\s]*\.intent\.extra\.[^\s]+$")

# No DTD loading, no entity expansion, no network
_PARSER = etree.XMLParser(resolve_entities=False, no_network=True, load_dtd=False, huge_tree=False)


def _local_name(node) -> str:
    return etree.QName(node).localname


def _name_attr(elem) -> Optional[str]:
    """
    Value of the element's ``name`` attribute.

    Prefers ``android:name``; falls back to an unqualified ``name`` and then to
    ``name`` under any other namespace, since apktool output varies.
    """
    value = elem.get(f"{{{ANDROID_NS}}}name")
    if value is not None:
        return value
    value = elem.get("name")
    if value is not None:
        return value
    for key, val in elem.attrib.items():
        if etree.QName(key).localname == "name":
            return val
    return None


def _parse_root(xml_text: Union[str, bytes], app_id: str, source_path: str):
    data = xml_text.encode("utf-8") if isinstance(xml_text, str) else xml_text
    try:
        root = etree.fromstring(data, parser=_PARSER)
    except etree.XMLSyntaxError as e:
        line = e.position[0] if e.position else None
        raise MalformedXml(f"Unparseable manifest: {e.msg}", app_id=app_id,
                           file=source_path or None, line=line) from e
    if root is None or _local_name(root) != "manifest":
        found = _local_name(root) if root is not None else None
        raise MissingManifestRoot(f"Root element is '{found}', expected 'manifest'",
                                  app_id=app_id, file=source_path or None)
    return root


def iter_filter_intents(root) -> Iterator[Tuple[IntentKind, str, object]]:
    """Yield (kind, raw_name, element) for every action/category inside an intent-filter."""
    for flt in root.iter(etree.Element):
        if _local_name(flt) != FILTER_TAG:
            continue
        for child in flt:
            if not isinstance(child.tag, str):
                continue  # comments, processing instructions
            kind = FILTER_CHILD_KINDS.get(_local_name(child))
            if kind is None:
                continue
            raw = _name_attr(child)
            if raw and raw.strip():
                yield kind, raw.strip(), child


def iter_extra_values(root) -> Iterator[str]:
    """
    Yield attribute values matching ``*.intent.extra.*``.

    Filter children are scanned too: an action named like an extra counts as
    both an Action and an Extra.
    """
    for elem in root.iter(etree.Element):
        for value in elem.attrib.values():
            value = value.strip()
            if EXTRA_PATTERN.match(value):
                yield value


def parse_manifest(
    xml_text: Union[str, bytes],
    app_id: str,
    label: Label = Label.UNLABELED,
    source_path: str = "",
) -> AppSample:
    """
    Parse one manifest into an AppSample.

    Raises:
        MalformedXml: input is not well-formed XML
        MissingManifestRoot: root element is not <manifest>
    """
    root = _parse_root(xml_text, app_id, source_path)

    intents: Counter = Counter()
    for kind, raw, _ in iter_filter_intents(root):
        try:
            intents[IntentKey.from_raw(kind, raw)] += 1
        except EmptyName:
            continue

    for raw in iter_extra_values(root):
        try:
            intents[IntentKey.from_raw(IntentKind.EXTRA, raw)] += 1
        except EmptyName:
            continue

    return AppSample(app_id=app_id, label=label, intents=intents, source_path=source_path)
