# Formatters package