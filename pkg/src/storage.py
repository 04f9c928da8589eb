"""Scan stores: append-only JSONL with chunk commit markers, plus a SQLite sorted index."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Dict, Iterator, List, Optional

from sqlalchemy import Boolean, Column, Integer, String, Text, create_engine, delete, func, insert, select
from sqlalchemy.orm import Session, declarative_base, sessionmaker

from src.config import Config
from src.errors import StoreCorruptionError
from src.schemas import ChunkMarker, PrimeRecord, ScanKind, StoreHeader, StoreState

logger = logging.getLogger(__name__)

Base = declarative_base()

_HEADER_TAG = b'{"_scan"'
_CHUNK_TAG = b'{"_chunk"'
_COMPLETE_TAG = b'{"_complete"'


def _digest(lines: List[bytes]) -> str:
    sha = hashlib.sha256()
    for line in lines:
        sha.update(line)
    return sha.hexdigest()


def store_fingerprint(state: StoreState) -> str:
    """Identity of a verified store: header, committed chunks and completion bound."""
    sha = hashlib.sha256(json.dumps(state.header.model_dump(), sort_keys=True).encode("utf-8"))
    last = state.chunks[-1].sha256 if state.chunks else ""
    sha.update(f"|{len(state.chunks)}|{state.committed_bytes}|{last}|{state.complete}".encode("utf-8"))
    return sha.hexdigest()


class ScanStore:
    """Append-only JSONL store of PrimeRecords.

    Layout: one header line, then per chunk the record lines followed by a
    marker {"_chunk", "first", "last", "count", "sha256"} whose checksum
    covers the record lines, and finally {"_complete": x_max} once a scan
    has finished. Anything after the last marker is uncommitted.
    """

    def __init__(self, path: Optional[Path] = None):
        """Initialize store.

        Args:
            path: JSONL file; defaults to scan.jsonl in Config.STORE_DIR
        """
        self.path = Path(path) if path else Config.STORE_DIR / "scan.jsonl"

    @property
    def index_path(self) -> Path:
        return self.path.with_name(self.path.name + ".index.db")

    @property
    def sorted_path(self) -> Path:
        return self.path.with_name(self.path.name + ".sorted.jsonl")

    def exists(self) -> bool:
        return self.path.exists() and self.path.stat().st_size > 0

    def create(self, header: StoreHeader) -> StoreState:
        """Start a new store, replacing any existing file."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if self.index_path.exists():
            self.index_path.unlink()
            logger.debug(f"Stale index removed: {self.index_path}")
        line = json.dumps({"_scan": header.model_dump()}) + "\n"
        with self.path.open("wb") as stream:
            stream.write(line.encode("utf-8"))
        logger.info(f"Scan store created: {self.path} (kinds {','.join(header.kinds)})")
        size = len(line.encode("utf-8"))
        return StoreState(header=header, committed_bytes=size, end_bytes=size)

    def verify(self) -> StoreState:
        """Check every committed chunk and locate the end of committed data.

        Raises:
            StoreCorruptionError: a committed chunk fails its checksum, count
                or ordering checks, or the header is unreadable
        """
        data = self.path.read_bytes()
        lines = data.splitlines(keepends=True)
        if not lines or not lines[0].startswith(_HEADER_TAG) or not lines[0].endswith(b"\n"):
            logger.error(f"Store header unreadable: {self.path}")
            raise StoreCorruptionError(f"{self.path} has no valid header", last_valid_chunk=None)
        try:
            header = StoreHeader(**json.loads(lines[0])["_scan"])
        except Exception as e:
            logger.error(f"Store header unreadable: {e}")
            raise StoreCorruptionError(f"{self.path} has no valid header: {e}", last_valid_chunk=None)

        offset = len(lines[0])
        committed = offset
        end = offset
        chunks: List[ChunkMarker] = []
        pending: List[bytes] = []
        complete: Optional[int] = None
        previous_last = 2

        def fail(message: str):
            last_valid = chunks[-1].chunk if chunks else None
            logger.error(f"Store corrupt after chunk {last_valid}: {message}")
            raise StoreCorruptionError(f"{self.path}: {message}", last_valid_chunk=last_valid)

        for line in lines[1:]:
            offset += len(line)
            if not line.endswith(b"\n"):
                break
            if line.startswith(_CHUNK_TAG):
                try:
                    raw = json.loads(line)
                    marker = ChunkMarker(chunk=raw["_chunk"], **{k: v for k, v in raw.items() if k != "_chunk"})
                except Exception as e:
                    fail(f"unreadable commit marker: {e}")
                if marker.chunk != len(chunks):
                    fail(f"chunk {marker.chunk} out of sequence")
                if marker.count != len(pending) or marker.sha256 != _digest(pending):
                    fail(f"checksum mismatch in chunk {marker.chunk}")
                first = json.loads(pending[0])["p"]
                last = json.loads(pending[-1])["p"]
                if (first, last) != (marker.first, marker.last) or (chunks and first <= previous_last):
                    fail(f"prime range of chunk {marker.chunk} is inconsistent")
                chunks.append(marker)
                previous_last = last
                committed = end = offset
                pending = []
            elif line.startswith(_COMPLETE_TAG):
                if pending:
                    fail("completion marker inside an uncommitted chunk")
                complete = int(json.loads(line)["_complete"])
                end = offset
            else:
                pending.append(line)

        state = StoreState(
            header=header, chunks=chunks, committed_bytes=committed, end_bytes=end, complete=complete
        )
        logger.debug(f"Store verified: {len(chunks)} chunks, {state.record_count} records")
        return state

    def truncate_uncommitted(self, drop_completion: bool = False) -> StoreState:
        """Cut the file back to its committed data.

        Args:
            drop_completion: Also remove the completion line, so the scan
                can be extended to a larger bound
        """
        state = self.verify()
        size = self.path.stat().st_size
        if size > state.end_bytes:
            logger.warning(f"Discarding {size - state.end_bytes} uncommitted bytes from {self.path}")
        keep = state.end_bytes
        if drop_completion:
            keep = state.committed_bytes
            state = state.model_copy(update={"complete": None, "end_bytes": keep})
        if size > keep:
            with self.path.open("r+b") as stream:
                stream.truncate(keep)
        return state

    def append_chunk(self, chunk_id: int, lines: List[str]) -> ChunkMarker:
        """Append the record lines of one chunk and commit them."""
        payload = [(line.rstrip("\n") + "\n").encode("utf-8") for line in lines]
        first = json.loads(payload[0])["p"]
        last = json.loads(payload[-1])["p"]
        marker = ChunkMarker(chunk=chunk_id, first=first, last=last, count=len(payload), sha256=_digest(payload))
        marker_line = json.dumps({"_chunk": marker.chunk, **marker.model_dump(exclude={"chunk"})}) + "\n"
        with self.path.open("ab") as stream:
            stream.writelines(payload)
            stream.write(marker_line.encode("utf-8"))
            stream.flush()
        logger.debug(f"Chunk {chunk_id} committed: p={first}..{last} ({len(payload)} records)")
        return marker

    def mark_complete(self, x_max: int) -> None:
        with self.path.open("ab") as stream:
            stream.write((json.dumps({"_complete": x_max}) + "\n").encode("utf-8"))
        logger.info(f"Scan store complete up to {x_max:,}: {self.path}")

    def iter_records(self, state: Optional[StoreState] = None) -> Iterator[PrimeRecord]:
        """Committed records in store order."""
        state = state or self.verify()
        with self.path.open("rb") as stream:
            stream.readline()
            position = stream.tell()
            for line in stream:
                position += len(line)
                if position > state.committed_bytes:
                    break
                if line.startswith(_CHUNK_TAG) or line.startswith(_COMPLETE_TAG):
                    continue
                yield PrimeRecord.model_validate_json(line)

    def write_sorted(self, state: Optional[StoreState] = None) -> Path:
        """Canonical export: header, then records sorted by p."""
        state = state or self.verify()
        records = sorted(self.iter_records(state), key=lambda r: r.p)
        with self.sorted_path.open("w", encoding="utf-8") as stream:
            stream.write(json.dumps({"_scan": state.header.model_dump()}) + "\n")
            for record in records:
                stream.write(record.model_dump_json() + "\n")
        logger.info(f"Sorted export written: {self.sorted_path} ({len(records)} records)")
        return self.sorted_path


class PrimeRow(Base):
    """Index row for one PrimeRecord."""

    __tablename__ = "prime_records"

    p = Column(Integer, primary_key=True)
    residue_mod_8 = Column(Integer, nullable=False)
    ord2 = Column(Integer, nullable=False)
    ord4_is_half = Column(Boolean, nullable=False)
    b_irregular = Column(Boolean, nullable=True)
    e_irregular = Column(Boolean, nullable=True)
    g_irregular = Column(Boolean, nullable=True)
    wieferich = Column(Boolean, nullable=False)
    h_refined_residue = Column(Integer, nullable=True)
    record = Column(Text, nullable=False)  # JSON string


class IndexMeta(Base):
    """Key/value bookkeeping for the index."""

    __tablename__ = "index_meta"

    key = Column(String(64), primary_key=True)
    value = Column(Text, nullable=False)


_PREDICATES = {
    ScanKind.B: PrimeRow.b_irregular,
    ScanKind.E: PrimeRow.e_irregular,
    ScanKind.G: PrimeRow.g_irregular,
    ScanKind.Q: PrimeRow.ord4_is_half,
    ScanKind.W: PrimeRow.wieferich,
}


class RecordIndex:
    """SQLite index of a scan store, ordered by p."""

    def __init__(self, db_path: Path):
        """Initialize index.

        Args:
            db_path: Path to SQLite database
        """
        self.db_path = Path(db_path)
        self.engine = None
        self.Session = None
        self._initialize_db()

    def _initialize_db(self):
        """Initialize database connection and create tables."""
        try:
            self.db_path.parent.mkdir(parents=True, exist_ok=True)

            db_url = f"sqlite:///{self.db_path}"
            self.engine = create_engine(db_url, echo=False)

            Base.metadata.create_all(self.engine)

            self.Session = sessionmaker(bind=self.engine)

            logger.debug(f"Index initialized: {self.db_path}")

        except Exception as e:
            logger.error(f"Failed to initialize index: {e}")
            raise

    def _meta(self, session: Session) -> Dict[str, str]:
        return {row.key: row.value for row in session.query(IndexMeta).all()}

    def is_current(self, state: StoreState) -> bool:
        session: Session = self.Session()
        try:
            meta = self._meta(session)
            return meta.get("fingerprint") == store_fingerprint(state)
        finally:
            session.close()

    def rebuild(self, store: ScanStore, state: StoreState, batch_size: int = 10000) -> int:
        """Replace the index contents with the committed records of the store.

        Returns:
            Number of indexed records
        """
        session: Session = self.Session()

        try:
            session.execute(delete(PrimeRow))
            session.execute(delete(IndexMeta))

            batch = []
            total = 0
            for record in store.iter_records(state):
                batch.append({
                    "p": record.p,
                    "residue_mod_8": record.residue_mod_8,
                    "ord2": record.ord2,
                    "ord4_is_half": record.ord4_is_half,
                    "b_irregular": record.b_irregular,
                    "e_irregular": record.e_irregular,
                    "g_irregular": record.g_irregular,
                    "wieferich": record.wieferich,
                    "h_refined_residue": record.h_refined_residue,
                    "record": record.model_dump_json(),
                })
                if len(batch) >= batch_size:
                    session.execute(insert(PrimeRow), batch)
                    total += len(batch)
                    batch = []
            if batch:
                session.execute(insert(PrimeRow), batch)
                total += len(batch)

            session.add(IndexMeta(key="chunks", value=str(len(state.chunks))))
            session.add(IndexMeta(key="complete", value=str(state.complete)))
            session.add(IndexMeta(key="fingerprint", value=store_fingerprint(state)))
            session.add(IndexMeta(key="store", value=str(store.path)))
            session.commit()

            logger.info(f"Index rebuilt: {self.db_path} ({total} records)")
            return total

        except Exception as e:
            session.rollback()
            logger.error(f"Failed to rebuild index: {e}")
            raise

        finally:
            session.close()

    def ensure_current(self, store: ScanStore, state: StoreState) -> None:
        if not self.is_current(state):
            self.rebuild(store, state)

    def count(self, kind: ScanKind, d: int, a: int, x: int) -> int:
        """Records with p <= x, p = a (mod d) satisfying the kind's predicate."""
        session: Session = self.Session()

        try:
            query = select(func.count()).select_from(PrimeRow).where(PrimeRow.p <= x)
            query = query.where(_PREDICATES[ScanKind(kind)].is_(True))
            if d > 1:
                query = query.where(PrimeRow.p % d == a % d)
            return int(session.execute(query).scalar_one())

        finally:
            session.close()

    def get_record(self, p: int) -> Optional[PrimeRecord]:
        session: Session = self.Session()

        try:
            row = session.get(PrimeRow, p)
            return PrimeRecord.model_validate_json(row.record) if row else None

        finally:
            session.close()

    def list_primes(self, kind: ScanKind, limit: int = 50, offset: int = 0) -> List[int]:
        """Primes satisfying the kind's predicate, in increasing order."""
        session: Session = self.Session()

        try:
            query = (
                select(PrimeRow.p)
                .where(_PREDICATES[ScanKind(kind)].is_(True))
                .order_by(PrimeRow.p)
                .limit(limit)
                .offset(offset)
            )
            return [int(p) for p in session.execute(query).scalars()]

        finally:
            session.close()

    def get_statistics(self) -> dict:
        """Get index statistics.

        Returns:
            Dictionary with statistics
        """
        session: Session = self.Session()

        try:
            total = session.query(PrimeRow).count()
            largest = session.query(func.max(PrimeRow.p)).scalar()
            counts = {
                kind.value: session.query(PrimeRow).filter(column.is_(True)).count()
                for kind, column in _PREDICATES.items()
            }

            return {
                "total_records": total,
                "largest_prime": largest,
                "counts": counts,
                "index_path": str(self.db_path),
            }

        except Exception as e:
            logger.error(f"Failed to get statistics: {e}")
            return {}

        finally:
            session.close()

    def dispose(self) -> None:
        if self.engine is not None:
            self.engine.dispose()
