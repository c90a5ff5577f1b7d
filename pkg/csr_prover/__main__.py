# SPDX-FileCopyrightText: 2024 Espressif Systems (Shanghai) CO LTD
# SPDX-License-Identifier: Apache-2.0

from .main import (
    main,
)

if __name__ == '__main__':
    main()
