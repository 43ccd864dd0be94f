"""Flat-directory persistence for speech documents.

Each speech is a pair of files named by its id: ``<id>.json`` (document) and
``<id>.wav`` (mono audio). Writes go to a temp file in the same directory and
are moved into place with ``os.replace`` so a crash mid-write never leaves a
torn document; readers only ever see the old or the new version.
"""
from __future__ import annotations

import json
import os
import re
import tempfile
import uuid
from pathlib import Path

from .errors import NotFoundError, ValidationError

_ID_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class SpeechStore:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _check_id(self, speech_id: str) -> str:
        if not _ID_RE.match(speech_id):
            raise ValidationError(f"invalid speech id {speech_id!r}")
        return speech_id

    def new_id(self) -> str:
        return uuid.uuid4().hex[:12]

    def _json_path(self, speech_id: str) -> Path:
        return self.root / f"{self._check_id(speech_id)}.json"

    def _wav_path(self, speech_id: str) -> Path:
        return self.root / f"{self._check_id(speech_id)}.wav"

    def _atomic_write(self, path: Path, data: bytes) -> None:
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise

    def save(self, speech_id: str, doc: dict, audio: bytes | None = None) -> None:
        if audio is not None:
            self._atomic_write(self._wav_path(speech_id), audio)
        payload = json.dumps(doc, indent=1).encode("utf-8")
        self._atomic_write(self._json_path(speech_id), payload)

    def load(self, speech_id: str) -> dict:
        path = self._json_path(speech_id)
        if not path.exists():
            raise NotFoundError(f"no speech {speech_id!r}")
        return json.loads(path.read_text("utf-8"))

    def load_audio(self, speech_id: str) -> bytes:
        path = self._wav_path(speech_id)
        if not path.exists():
            raise NotFoundError(f"no audio for speech {speech_id!r}")
        return path.read_bytes()

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json") if not p.name.startswith("."))

    def delete(self, speech_id: str) -> None:
        removed = False
        for path in (self._json_path(speech_id), self._wav_path(speech_id)):
            if path.exists():
                path.unlink()
                removed = True
        if not removed:
            raise NotFoundError(f"no speech {speech_id!r}")
