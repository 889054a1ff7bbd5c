import sys

from .cli import main, verify_main

if len(sys.argv) > 1 and sys.argv[1] == "verify-compat":
    sys.exit(verify_main(sys.argv[2:]))
sys.exit(main())
