"""Storage contracts: per-aggregate repositories behind a transactional store.

Two implementations exist: :class:`~greengrid.persistence.memory.MemoryStore`
(what the test suite runs on, zero external services) and
:class:`~greengrid.persistence.sqlite.SqliteStore` (embedded relational engine
with migrations). Both raise the same typed errors so the repository contract
suite passes identically against either.

Domain objects are treated as immutable values: repositories hand back the
stored object and callers build a new one (``dataclasses.replace``) to update.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import TYPE_CHECKING, Callable, Iterable, Optional, TypeVar

if TYPE_CHECKING:
    from ..auth import PasswordResetTicket, UserAccount
    from ..content import Article
    from ..impact import ImpactRecord
    from ..locator import EDumperCenter
    from ..marketplace import Order, Product
    from ..pickup import PickupRequest, PickupStatus
    from ..rewards import LedgerEntry, Redemption, RewardItem

T = TypeVar("T")


class UniqueViolation(Exception):
    """A uniqueness constraint rejected a write. ``constraint`` names which."""

    def __init__(self, constraint: str):
        super().__init__(f"unique constraint violated: {constraint}")
        self.constraint = constraint


class SerializationConflict(Exception):
    """Transient transaction conflict; ``within_transaction`` retries these."""


class UserRepo(ABC):
    @abstractmethod
    def add(self, user: "UserAccount") -> None: ...

    @abstractmethod
    def get(self, user_id: str) -> Optional["UserAccount"]: ...

    @abstractmethod
    def get_by_email(self, email: str) -> Optional["UserAccount"]: ...

    @abstractmethod
    def update(self, user: "UserAccount") -> None: ...

    @abstractmethod
    def count(self) -> int: ...


class ResetTicketRepo(ABC):
    @abstractmethod
    def add(self, ticket: "PasswordResetTicket") -> None: ...

    @abstractmethod
    def get(self, token: str) -> Optional["PasswordResetTicket"]: ...

    @abstractmethod
    def update(self, ticket: "PasswordResetTicket") -> None: ...


class CenterRepo(ABC):
    @abstractmethod
    def add(self, center: "EDumperCenter") -> None: ...

    @abstractmethod
    def get(self, center_id: str) -> Optional["EDumperCenter"]: ...

    @abstractmethod
    def update(self, center: "EDumperCenter") -> None: ...

    @abstractmethod
    def all(self) -> list["EDumperCenter"]: ...

    @abstractmethod
    def count(self) -> int: ...


class PickupRepo(ABC):
    @abstractmethod
    def add(self, pickup: "PickupRequest") -> None: ...

    @abstractmethod
    def get(self, pickup_id: str) -> Optional["PickupRequest"]: ...

    @abstractmethod
    def update_if_status(self, pickup: "PickupRequest", expected: "PickupStatus") -> bool:
        """Compare-and-set: persist ``pickup`` only if the stored row still has
        status ``expected``. Returns False when another writer got there first."""

    @abstractmethod
    def list_for_user(self, user_id: str) -> list["PickupRequest"]: ...

    @abstractmethod
    def all(self) -> list["PickupRequest"]: ...

    @abstractmethod
    def count_by_status(self, status: "PickupStatus") -> int: ...


class LedgerRepo(ABC):
    """Append-only: no update or delete operations exist, by construction."""

    @abstractmethod
    def append(self, entry: "LedgerEntry") -> None:
        """Raises UniqueViolation("ledger_earn_reference") when an earn entry
        with the same reference was already committed."""

    @abstractmethod
    def list_for_user(self, user_id: str) -> list["LedgerEntry"]:
        """Newest first: (created_at desc, id desc)."""

    @abstractmethod
    def sum_for_user(self, user_id: str) -> int: ...

    @abstractmethod
    def all(self) -> list["LedgerEntry"]: ...


class RewardItemRepo(ABC):
    @abstractmethod
    def add(self, item: "RewardItem") -> None: ...

    @abstractmethod
    def get(self, item_id: str) -> Optional["RewardItem"]: ...

    @abstractmethod
    def update(self, item: "RewardItem") -> None: ...

    @abstractmethod
    def decrement_stock(self, item_id: str) -> bool:
        """Atomically take one unit; False when stock is already zero."""

    @abstractmethod
    def all(self) -> list["RewardItem"]: ...


class RedemptionRepo(ABC):
    @abstractmethod
    def add(self, redemption: "Redemption") -> None: ...

    @abstractmethod
    def count_for_item(self, item_id: str) -> int: ...

    @abstractmethod
    def list_for_user(self, user_id: str) -> list["Redemption"]: ...


class ImpactRecordRepo(ABC):
    @abstractmethod
    def add(self, record: "ImpactRecord") -> None:
        """Raises UniqueViolation("impact_source_reference") on a duplicate source."""

    @abstractmethod
    def list_for_user(self, user_id: str) -> list["ImpactRecord"]: ...

    @abstractmethod
    def all(self) -> list["ImpactRecord"]: ...


class ArticleRepo(ABC):
    @abstractmethod
    def add(self, article: "Article") -> None:
        """Raises UniqueViolation("article_slug") on a duplicate slug."""

    @abstractmethod
    def get(self, article_id: str) -> Optional["Article"]: ...

    @abstractmethod
    def get_by_slug(self, slug: str) -> Optional["Article"]: ...

    @abstractmethod
    def update(self, article: "Article") -> None: ...

    @abstractmethod
    def all(self) -> list["Article"]: ...


class ProductRepo(ABC):
    @abstractmethod
    def add(self, product: "Product") -> None: ...

    @abstractmethod
    def get(self, product_id: str) -> Optional["Product"]: ...

    @abstractmethod
    def update(self, product: "Product") -> None: ...

    @abstractmethod
    def adjust_stock(self, product_id: str, delta: int) -> bool:
        """Atomically add ``delta`` (negative to take stock); False when the
        adjustment would drive stock below zero."""

    @abstractmethod
    def all(self) -> list["Product"]: ...


class OrderRepo(ABC):
    @abstractmethod
    def add(self, order: "Order") -> None: ...

    @abstractmethod
    def get(self, order_id: str) -> Optional["Order"]: ...

    @abstractmethod
    def update(self, order: "Order") -> None: ...

    @abstractmethod
    def list_for_user(self, user_id: str) -> list["Order"]: ...

    @abstractmethod
    def all(self) -> list["Order"]: ...


class Store(ABC):
    """Transactional boundary plus the per-aggregate repositories."""

    users: UserRepo
    reset_tickets: ResetTicketRepo
    centers: CenterRepo
    pickups: PickupRepo
    ledger: LedgerRepo
    reward_items: RewardItemRepo
    redemptions: RedemptionRepo
    impact_records: ImpactRecordRepo
    articles: ArticleRepo
    products: ProductRepo
    orders: OrderRepo

    MAX_TRANSACTION_ATTEMPTS = 3

    @abstractmethod
    def within_transaction(self, work: Callable[[], T]) -> T:
        """Run ``work`` atomically: all writes commit together or none do.

        Nested calls join the enclosing transaction. SerializationConflict
        raised inside ``work`` is retried up to MAX_TRANSACTION_ATTEMPTS times
        (outermost level only), then surfaced as Conflict.
        """

    def close(self) -> None:
        pass


def apply_pagination(items: Iterable[T], limit: int, offset: int) -> tuple[list[T], int]:
    """Slice an already-ordered sequence into a page, returning (items, total)."""
    seq = list(items)
    return seq[offset : offset + limit], len(seq)
