"""Namespace constants for the annotation vocabulary and its companions."""

from annokit.rdf import Iri

OAC = "http://www.openannotation.org/ns/"
DCTERMS = "http://purl.org/dc/terms/"
DC = "http://purl.org/dc/elements/1.1/"
CNT = "http://www.w3.org/2008/content#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
FOAF = "http://xmlns.com/foaf/0.1/"
XSD = "http://www.w3.org/2001/XMLSchema#"
OWL = "http://www.w3.org/2002/07/owl#"

# Prefix map used for Turtle output everywhere in the toolkit.
DEFAULT_PREFIXES = {
    "oac": OAC,
    "dcterms": DCTERMS,
    "dc": DC,
    "cnt": CNT,
    "rdf": RDF,
    "foaf": FOAF,
    "xsd": XSD,
}

RDF_TYPE = Iri(RDF + "type")

OAC_ANNOTATION = Iri(OAC + "Annotation")
OAC_REPLY = Iri(OAC + "Reply")
OAC_HAS_BODY = Iri(OAC + "hasBody")
OAC_HAS_TARGET = Iri(OAC + "hasTarget")
OAC_CONSTRAINS = Iri(OAC + "constrains")
OAC_HAS_CONSTRAINT = Iri(OAC + "hasConstraint")
OAC_CONSTRAINT = Iri(OAC + "Constraint")
OAC_CONSTRAINED_TARGET = Iri(OAC + "ConstrainedTarget")
OAC_CONSTRAINED_BODY = Iri(OAC + "ConstrainedBody")
OAC_SVG_CONSTRAINT = Iri(OAC + "SvgConstraint")
OAC_WEB_TIME_CONSTRAINT = Iri(OAC + "WebTimeConstraint")
OAC_WHEN = Iri(OAC + "when")

DCTERMS_CREATED = Iri(DCTERMS + "created")
DCTERMS_CREATOR = Iri(DCTERMS + "creator")
DCTERMS_IS_PART_OF = Iri(DCTERMS + "isPartOf")
DC_TITLE = Iri(DC + "title")
DC_FORMAT = Iri(DC + "format")

CNT_CHARS = Iri(CNT + "chars")
CNT_CHARACTER_ENCODING = Iri(CNT + "characterEncoding")
CNT_CONTENT_AS_TEXT = Iri(CNT + "ContentAsText")
CNT_CONTENT_AS_BASE64 = Iri(CNT + "ContentAsBase64")
CNT_CONTENT_AS_XML = Iri(CNT + "ContentAsXML")

XSD_DATETIME = Iri(XSD + "dateTime")
OWL_SAME_AS = Iri(OWL + "sameAs")
