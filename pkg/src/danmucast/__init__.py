"""danmucast: compile time-synced video comments into audio discussions.

The pipeline turns four input artifacts (SubRip transcript, Danmu comment
XML, a keyframe index, and the video's audio track) into a renderable
discussion timeline: comments are curated into topics, scored, placed into
non-speech gaps and speech breaks by an exact solver, and rendered to a
spatialized stereo preview plus a manifest consumed by the web player.
"""

__version__ = "0.1.0"
