# Empty init file to make the controllers directory a package
