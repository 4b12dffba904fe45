import sys

from lzcomm.cli import main

sys.exit(main())
