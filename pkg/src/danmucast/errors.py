"""Exception hierarchy shared across the pipeline."""


class DanmucastError(Exception):
    """Base class for all pipeline errors."""


# --- ingest -----------------------------------------------------------------

class MalformedTimestamp(DanmucastError):
    """A transcript cue has an unparsable or inverted timestamp."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class OverlapError(DanmucastError):
    """A transcript cue overlaps its predecessor."""


class XmlSyntaxError(DanmucastError):
    """The Danmu XML document is not well formed."""


class AttributeArity(DanmucastError):
    """A ``<d>`` element carries fewer than 8 comma-separated p-fields."""

    def __init__(self, message: str, element_index: int | None = None):
        self.element_index = element_index
        if element_index is not None:
            message = f"element {element_index}: {message}"
        super().__init__(message)


class NumericField(DanmucastError):
    """A numeric field in a Danmu p-attribute failed to parse."""


class EmptyAudio(DanmucastError):
    """Audio input contains zero samples."""


# --- segmentation -----------------------------------------------------------

class DurationMismatch(DanmucastError):
    """The transcript extends past the declared video duration."""


# --- providers --------------------------------------------------------------

class ProviderFailure(DanmucastError):
    """A provider call failed (remote error, exhausted retries, bad reply)."""


class DurationUnachievable(DanmucastError):
    """TTS cannot fit the text into the allowed speech-rate window."""


# --- optimizer / timeline / audio -------------------------------------------

class NoCandidates(DanmucastError):
    """A topic has zero candidate insertion points."""


class CapacityViolation(DanmucastError):
    """Scheduled lines exceed the insertion point's capacity."""


class AssetMissing(DanmucastError):
    """A rendered audio asset referenced by the manifest is absent."""


# --- cli --------------------------------------------------------------------

class StaleArtifact(DanmucastError):
    """A stage artifact was produced under a different configuration."""


class MissingStage(DanmucastError):
    """A required upstream stage artifact has not been produced yet."""
