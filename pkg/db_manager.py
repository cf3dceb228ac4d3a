import sqlite3
import json
import logging
import os
from datetime import datetime

logger = logging.getLogger(__name__)

DB_FILENAME = os.getenv("CRYSTAL_DB", "db.sqlite3")


def existing_db(db_filename=None):
    """The database path if the file exists, else None."""
    path = db_filename or DB_FILENAME
    return path if os.path.exists(path) else None


# Initialize the database and create tables if they don't exist
def initialize_db(db_filename=None):
    conn = sqlite3.connect(db_filename or DB_FILENAME)
    cursor = conn.cursor()

    cursor.execute('''
    CREATE TABLE IF NOT EXISTS saved_group (
        name TEXT PRIMARY KEY,
        label TEXT,
        n INTEGER NOT NULL,
        q INTEGER NOT NULL,
        rows TEXT NOT NULL,
        exact_order INTEGER NOT NULL DEFAULT 1,
        saved_at TEXT
    )
    ''')

    cursor.execute('''
    CREATE TABLE IF NOT EXISTS usersettings (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        setting_name TEXT NOT NULL UNIQUE,
        settings TEXT NOT NULL
    )
    ''')

    conn.commit()
    conn.close()


def save_group(name, descriptor, db_filename=None):
    """
    Add or replace a group under the given name.

    Args:
        name (str): Name to store the group under.
        descriptor (dict): Group descriptor with label, n, q and rows.
        db_filename (str, optional): Path to the SQLite database file.
    """
    initialize_db(db_filename)
    conn = sqlite3.connect(db_filename or DB_FILENAME)
    cursor = conn.cursor()
    cursor.execute('''
    INSERT INTO saved_group (name, label, n, q, rows, exact_order, saved_at)
    VALUES (?, ?, ?, ?, ?, ?, ?)
    ON CONFLICT(name) DO UPDATE SET
    label=excluded.label,
    n=excluded.n,
    q=excluded.q,
    rows=excluded.rows,
    exact_order=excluded.exact_order,
    saved_at=excluded.saved_at
    ''', (
        name,
        descriptor.get("label"),
        descriptor["n"],
        descriptor["q"],
        json.dumps(descriptor["rows"]),
        int(descriptor.get("exact_order", True)),
        datetime.now().isoformat(timespec="seconds"),
    ))
    conn.commit()
    conn.close()
    logger.debug("Saved group %s", name)


def get_group(name, db_filename=None):
    """
    Retrieve a saved group descriptor.

    Returns:
        dict or None: The descriptor if found, or None if not found or on database errors.
    """
    path = existing_db(db_filename)
    if path is None:
        return None
    try:
        with sqlite3.connect(path) as conn:
            cursor = conn.cursor()
            cursor.execute('SELECT label, n, q, rows, exact_order FROM saved_group WHERE name = ?', (name,))
            row = cursor.fetchone()
            if not row:
                return None
            label, n, q, rows, exact_order = row
            descriptor = {"label": label or name, "n": n, "q": q, "rows": json.loads(rows)}
            if not exact_order:
                descriptor["exact_order"] = False
            return descriptor
    except sqlite3.Error as e:
        logger.error("An error occurred: %s", e)
        return None


def read_saved_names(db_filename=None):
    """
    Names of saved groups, or an empty list if the database is missing or unreadable.
    """
    path = existing_db(db_filename)
    if path is None:
        return []
    try:
        conn = sqlite3.connect(path)
        cursor = conn.cursor()
        cursor.execute("SELECT name FROM saved_group ORDER BY name")
        names = [row[0] for row in cursor.fetchall()]
        conn.close()
        return names
    except sqlite3.OperationalError as e:
        # Missing tables or database files
        logger.error("Database error: %s", e)
        return []


def remove_saved_names(names_to_remove, output_type, db_filename=None):
    """
    Removes the named groups from the database.

    Args:
    names_to_remove (list of str): The names of the saved groups to remove.
    output_type (str): "text" and "html" print the outcome, anything else returns it.
    db_filename (str): The path to the SQLite database file.

    Returns:
    str: A message describing what was removed (empty when printed).
    """
    existing_names = set(read_saved_names(db_filename))
    names_to_remove = set(names_to_remove)

    invalid_names = sorted(names_to_remove - existing_names)
    valid_names = sorted(names_to_remove & existing_names)

    if valid_names:
        try:
            conn = sqlite3.connect(db_filename or DB_FILENAME)
            cursor = conn.cursor()
            cursor.execute("DELETE FROM saved_group WHERE name IN ({})".format(
                ','.join('?' * len(valid_names))), valid_names)
            conn.commit()
            conn.close()
        except sqlite3.OperationalError as e:
            logger.error("Database error: %s", e)
            return f"Database error: {e}"

    to_return = ""
    if invalid_names:
        to_return += f"\nThe following names are not saved groups: {', '.join(invalid_names)}.\n"
    if valid_names:
        to_return += f"\nThe following names have been removed: {', '.join(valid_names)}.\n"

    if output_type in ('text', 'html'):
        print(to_return)
        return ""
    return to_return


def store_defaults(defaults, db_filename=None):
    """
    Stores the given settings under defaults["Name"].
    """
    initialize_db(db_filename)
    conn = sqlite3.connect(db_filename or DB_FILENAME)
    cursor = conn.cursor()
    cursor.execute('''
        INSERT INTO usersettings (setting_name, settings)
        VALUES (?, ?)
        ON CONFLICT(setting_name)
        DO UPDATE SET
            settings = excluded.settings
    ''', (defaults["Name"], json.dumps(defaults)))
    conn.commit()
    conn.close()


def read_defaults(settings_name, db_filename=None):
    """
    Reads stored settings by name.

    Returns:
    dict: The stored settings, or an empty dict if there are none.
    """
    path = existing_db(db_filename)
    if path is None:
        return {}
    conn = sqlite3.connect(path)
    cursor = conn.cursor()

    try:
        cursor.execute('SELECT settings FROM usersettings WHERE setting_name = ?', (settings_name,))
        row = cursor.fetchone()
        defaults = json.loads(row[0]) if row else {}
    except sqlite3.OperationalError as e:
        logger.error("Database error: %s", e)
        defaults = {}

    conn.close()
    return defaults
