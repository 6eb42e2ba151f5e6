from MagnonFisher.main import entry_point

entry_point()
