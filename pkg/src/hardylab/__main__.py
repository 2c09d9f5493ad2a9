import sys

from .xcli.main import main

sys.exit(main())
