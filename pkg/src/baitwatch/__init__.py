"""baitwatch: measurement pipeline for the hosting infrastructure behind
search-poisoned clickbait PDFs."""

__version__ = "0.1.0"
