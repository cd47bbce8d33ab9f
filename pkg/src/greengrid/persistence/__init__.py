from .base import SerializationConflict, Store, UniqueViolation
from .memory import MemoryStore
from .sqlite import SqliteStore

__all__ = ["Store", "UniqueViolation", "SerializationConflict", "MemoryStore", "SqliteStore"]
