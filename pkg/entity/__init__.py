# Empty init file to mark directory as Python package

