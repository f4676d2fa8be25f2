# Tests for fluvius_navem package
