"""Module runner: python -m membrane_etalon <command> ..."""
from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
