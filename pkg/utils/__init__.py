#!/usr/bin/env python3
"""
Utils package initialization
"""
