"""digestweaver: build one personalized digest page out of many search results.

The library fetches the pages behind a ranked result list, splits each page
into coherent segments, scores every segment against the query and the user's
profile terms, keeps the segments above a threshold, and stitches them into a
single HTML page via token replacement.
"""

__version__ = "0.1.0"
