"""Local stability and dividing modulo ideals on finite structures."""
