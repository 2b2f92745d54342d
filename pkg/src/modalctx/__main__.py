import sys

from modalctx.cli import main

sys.exit(main())
