"""Pacote de testes unitários."""
