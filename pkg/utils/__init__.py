# Empty init file to make the utils directory a package
