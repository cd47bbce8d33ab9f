"""Command-line entry points: serve, migrate, seed, create-admin."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import click

from .auth import AccountStatus, Role
from .bootstrap import build_services, build_store
from .config import load_config
from .persistence import SqliteStore

logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@click.group()
def main():
    """Green Grid e-waste recycling platform."""


def _config_option(fn):
    return click.option("--config", "config_path", type=click.Path(exists=True),
                        default=None, help="Path to a greengrid YAML config file.")(fn)


@main.command()
@_config_option
@click.option("--host", default=None, help="Bind address (overrides config).")
@click.option("--port", type=int, default=None, help="Port (overrides config).")
@click.option("--seed/--no-seed", "do_seed", default=False,
              help="Load the packaged seed data before serving.")
def serve(config_path: Optional[str], host: Optional[str], port: Optional[int],
          do_seed: bool):
    """Run the HTTP API."""
    import uvicorn

    from .api import create_app
    from .seeds import seed_all

    config = load_config(config_path)
    services = build_services(config)
    if do_seed:
        seed_all(services)
    app = create_app(services)
    uvicorn.run(app, host=host or config.host, port=port or config.port)


@main.command()
@_config_option
def migrate(config_path: Optional[str]):
    """Apply pending schema migrations (relational backends only)."""
    config = load_config(config_path)
    store = build_store(config, auto_migrate=False)
    if not isinstance(store, SqliteStore):
        click.echo("nothing to migrate: the in-memory store has no schema")
        return
    applied = store.migrate()
    click.echo(f"applied {applied} migration(s)")


@main.command()
@_config_option
@click.option("--dir", "seed_dir", type=click.Path(exists=True, file_okay=False),
              default=None, help="Seed directory (default: packaged data).")
def seed(config_path: Optional[str], seed_dir: Optional[str]):
    """Load centers, articles, reward items and products into the store."""
    from .seeds import seed_all

    config = load_config(config_path)
    services = build_services(config)
    counts = seed_all(services, Path(seed_dir) if seed_dir else None)
    if config.db_url == "memory://":
        click.echo("warning: memory:// store; seeded data lives only in this process")
    click.echo(", ".join(f"{name}: {count}" for name, count in sorted(counts.items())))


@main.command("create-admin")
@_config_option
@click.option("--email", required=True)
@click.option("--password", required=True)
@click.option("--name", "display_name", default="Administrator")
def create_admin(config_path: Optional[str], email: str, password: str,
                 display_name: str):
    """Seed the first admin account."""
    config = load_config(config_path)
    services = build_services(config)
    user = services.auth.register(email, display_name, password)
    # direct role escalation: this is the bootstrap path, no admin exists yet
    import dataclasses

    promoted = dataclasses.replace(user, role=Role.ADMIN, status=AccountStatus.ACTIVE)
    services.store.users.update(promoted)
    click.echo(f"created admin {promoted.email} ({promoted.id})")


if __name__ == "__main__":
    main()
