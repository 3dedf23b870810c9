"""Missing-and-found match service: enroll photos with person metadata over
HTTP, query by photo, return ranked candidates for a human operator.

Persistence is an append-only record log plus content-addressed image blobs
under the data directory; the in-memory index is rebuilt at startup. Reads
operate on an immutable gallery snapshot swapped atomically after each
enrollment, so concurrent queries never observe a partial record.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import struct
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, File, Form, HTTPException, Query, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from PIL import Image, UnidentifiedImageError

from . import model as mdl
from .classifier import GalleryEntry, classify, rank
from .modelstore import _pack_matrix, _pack_str, load_model_file

MODEL_ENV = "HOGFACE_MODEL"
DATA_DIR_ENV = "HOGFACE_PORTAL_DATA"
STATUSES = ("missing", "found")


@dataclass(frozen=True)
class PersonRecord:
    id: str
    name: str
    status: str
    contact: str
    enrolled_at: int
    photo_refs: tuple[str, ...]

    def as_json(self) -> dict:
        return {"id": self.id, "name": self.name, "status": self.status,
                "contact": self.contact, "enrolled_at": self.enrolled_at,
                "photo_refs": list(self.photo_refs)}


def decode_upload(data: bytes) -> np.ndarray:
    """Decode PGM/PNG/JPEG bytes to a grayscale float image."""
    try:
        with Image.open(io.BytesIO(data)) as im:
            return np.asarray(im.convert("L"), dtype=np.float64)
    except (UnidentifiedImageError, OSError, ValueError):
        raise HTTPException(422, "image could not be decoded (PGM, PNG, or JPEG expected)")


class PortalStore:
    """Model + durable gallery. One serialized writer, snapshot reads."""

    def __init__(self, model_path: str | Path, data_dir: str | Path):
        self.model = load_model_file(model_path)
        self.model_version = hashlib.sha256(Path(model_path).read_bytes()).hexdigest()[:12]
        self.data_dir = Path(data_dir)
        self.blob_dir = self.data_dir / "blobs"
        self.blob_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / "records.log"
        self._lock = threading.Lock()
        self.persons: dict[str, PersonRecord] = {}
        self.gallery: tuple[GalleryEntry, ...] = ()
        self._replay()

    # ---- persistence ----

    def _encode_record(self, rec: PersonRecord, features: list[np.ndarray]) -> bytes:
        payload = bytearray()
        for s in (rec.id, rec.name, rec.status, rec.contact):
            payload += _pack_str(s)
        payload += struct.pack("<Q", rec.enrolled_at)
        payload += _pack_str(rec.photo_refs[-1])
        payload += struct.pack("<I", len(features))
        for feat in features:
            payload += _pack_matrix(feat)
        return struct.pack("<I", len(payload)) + bytes(payload)

    def _replay(self) -> None:
        if not self.log_path.exists():
            return
        data = self.log_path.read_bytes()
        pos = 0
        entries: list[GalleryEntry] = []
        while pos + 4 <= len(data):
            (n,) = struct.unpack_from("<I", data, pos)
            if pos + 4 + n > len(data):
                break  # truncated tail from an interrupted write; ignore
            body, pos = data[pos + 4 : pos + 4 + n], pos + 4 + n
            rec, feats = self._decode_record(body)
            prev = self.persons.get(rec.id)
            if prev is not None:
                rec = PersonRecord(rec.id, rec.name, rec.status, rec.contact,
                                   prev.enrolled_at, prev.photo_refs + rec.photo_refs)
            self.persons[rec.id] = rec
            entries.append(GalleryEntry(label=rec.id, features=feats,
                                        source_id=rec.photo_refs[-1]))
        self.gallery = tuple(entries)

    @staticmethod
    def _decode_record(body: bytes) -> tuple[PersonRecord, list[np.ndarray]]:
        pos = 0

        def take_str() -> str:
            nonlocal pos
            (n,) = struct.unpack_from("<I", body, pos)
            s = body[pos + 4 : pos + 4 + n].decode("utf-8")
            pos += 4 + n
            return s

        pid, name, status, contact = take_str(), take_str(), take_str(), take_str()
        (enrolled_at,) = struct.unpack_from("<Q", body, pos)
        pos += 8
        photo = take_str()
        (bins,) = struct.unpack_from("<I", body, pos)
        pos += 4
        feats = []
        for _ in range(bins):
            rows, cols = struct.unpack_from("<II", body, pos)
            pos += 8
            feats.append(np.frombuffer(body, dtype="<f8", count=rows * cols,
                                       offset=pos).reshape(rows, cols).copy())
            pos += rows * cols * 8
        return PersonRecord(pid, name, status, contact, enrolled_at, (photo,)), feats

    # ---- operations ----

    def enroll(self, image_bytes: bytes, name: str, status: str, contact: str) -> str:
        img = decode_upload(image_bytes)
        if img.shape[0] < 2 or img.shape[1] < 2:
            raise HTTPException(422, f"image too small: {img.shape[0]}x{img.shape[1]}")
        cfg = self.model.config
        stack = mdl.extract_layers(img, cfg)
        feats = [stack[b] @ self.model.bases[b].X for b in range(cfg.bins)]

        with self._lock:
            pid = uuid.uuid4().hex
            sha = hashlib.sha256(image_bytes).hexdigest()
            blob = self.blob_dir / sha
            if not blob.exists():
                blob.write_bytes(image_bytes)
            rec = PersonRecord(pid, name, status, contact, int(time.time()), (sha,))
            with open(self.log_path, "ab") as f:
                f.write(self._encode_record(rec, feats))
                f.flush()
                os.fsync(f.fileno())
            self.persons[pid] = rec
            self.gallery = self.gallery + (GalleryEntry(pid, feats, sha),)
        return pid

    def query(self, image_bytes: bytes, k: int, status_filter: str | None) -> dict:
        img = decode_upload(image_bytes)
        gallery = self.gallery
        if status_filter:
            gallery = tuple(e for e in gallery
                            if self.persons[e.label].status == status_filter)
        if not gallery:
            return {"candidates": [], "model_version": self.model_version}
        stack = mdl.extract_layers(img, self.model.config)
        result_rank = rank(stack, self.model.bases, list(gallery), k)
        res = classify(stack, self.model.bases, list(gallery))
        candidates = [
            {"person_id": pid, "name": self.persons[pid].name,
             "status": self.persons[pid].status, "score": score,
             "votes": res.votes.get(pid, 0),
             "total_distance": res.total_distance[pid]}
            for pid, score in result_rank
        ]
        return {"candidates": candidates, "model_version": self.model_version}


def create_app(model_path: str | Path, data_dir: str | Path,
               static_dir: str | Path | None = None) -> FastAPI:
    store = PortalStore(model_path, data_dir)
    app = FastAPI(title="hogface portal")
    app.state.store = store

    @app.exception_handler(HTTPException)
    async def http_error(_req: Request, exc: HTTPException):
        return JSONResponse(status_code=exc.status_code,
                            content={"code": exc.status_code, "message": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def validation_error(_req: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"code": 400, "message": str(exc.errors()[:1])})

    @app.post("/api/persons", status_code=201)
    async def enroll(photo: UploadFile = File(...), metadata: str = Form(...)):
        try:
            meta = json.loads(metadata)
        except json.JSONDecodeError:
            raise HTTPException(422, "metadata is not valid JSON")
        name = (meta.get("name") or "").strip()
        status = meta.get("status", "")
        if not name:
            raise HTTPException(422, "name must be nonempty")
        if status not in STATUSES:
            raise HTTPException(422, f"status must be one of {STATUSES}")
        pid = store.enroll(await photo.read(), name, status,
                           str(meta.get("contact", "")))
        return {"id": pid}

    @app.post("/api/match")
    async def match(photo: UploadFile = File(...),
                    k: int = Query(5, ge=1),
                    status: str | None = Query(None)):
        if status is not None and status not in STATUSES:
            raise HTTPException(422, f"status must be one of {STATUSES}")
        return store.query(await photo.read(), k, status)

    @app.get("/api/persons/{person_id}")
    async def get_person(person_id: str):
        rec = store.persons.get(person_id)
        if rec is None:
            raise HTTPException(404, f"no person {person_id!r}")
        return rec.as_json()

    @app.get("/api/health")
    async def health():
        return {"model_version": store.model_version,
                "gallery_size": len(store.gallery)}

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def main(argv: list[str] | None = None) -> int:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="hogface-portal")
    parser.add_argument("--listen", default="127.0.0.1:8000")
    parser.add_argument("--model", default=os.environ.get(MODEL_ENV))
    parser.add_argument("--data-dir", default=os.environ.get(DATA_DIR_ENV))
    parser.add_argument("--static-dir", default=None,
                        help="serve a built UI from this directory at /")
    args = parser.parse_args(argv)
    if not args.model or not args.data_dir:
        parser.error(f"--model and --data-dir required (or ${MODEL_ENV}, ${DATA_DIR_ENV})")
    host, _, port = args.listen.rpartition(":")
    app = create_app(args.model, args.data_dir, args.static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
