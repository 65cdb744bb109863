"""
Тесты для проекта Parabolab.

Этот пакет содержит unit и интеграционные тесты для всех компонентов.
"""
